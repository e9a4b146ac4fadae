#![allow(dead_code)]

use convexcalc_core::calculus::MaxAffineFunction;
use convexcalc_core::exact::rat::frac;
use convexcalc_core::exact::{Rat, RatVector};
use convexcalc_core::polyhedron::{dd_convert_back, Constraint, HPolyhedron, VPolyhedron};
use proptest::prelude::*;

pub fn coef() -> impl Strategy<Value = i64> {
    -4i64..=4
}

pub fn int_vec(dim: usize) -> impl Strategy<Value = RatVector> {
    prop::collection::vec(coef(), dim).prop_map(|v| RatVector::from_ints(&v))
}

pub fn rat_vec(dim: usize) -> impl Strategy<Value = RatVector> {
    prop::collection::vec((coef(), 1i64..=4), dim)
        .prop_map(|v| RatVector::new(v.into_iter().map(|(n, d)| frac(n, d)).collect()))
}

/// Hull of a few integer points, plus an optional ray.
pub fn vpoly(dim: usize) -> impl Strategy<Value = VPolyhedron> {
    (prop::collection::vec(int_vec(dim), 1..5), prop::option::of(int_vec(dim)))
        .prop_map(move |(pts, ray)| VPolyhedron::new(dim, pts, ray.into_iter().collect(), vec![]).unwrap())
}

pub fn polytope(dim: usize) -> impl Strategy<Value = (VPolyhedron, HPolyhedron)> {
    prop::collection::vec(int_vec(dim), 1..6).prop_map(move |pts| {
        let v = VPolyhedron::from_points(dim, pts).unwrap();
        let h = dd_convert_back(&v).unwrap();
        (v, h)
    })
}

/// Random rows around the origin, so the set always contains `0`; possibly unbounded.
pub fn hpoly(dim: usize) -> impl Strategy<Value = HPolyhedron> {
    (prop::collection::vec((int_vec(dim), 0i64..=3), 1..5), prop::option::of(int_vec(dim))).prop_map(
        move |(rows, eq)| {
            let ineqs = rows.into_iter().map(|(a, b)| Constraint::new(a, Rat::from_integer(b.into()))).collect();
            let eqs = eq.into_iter().filter(|e| !e.is_zero()).map(|e| Constraint::new(e, Rat::from_integer(0.into()))).collect();
            HPolyhedron::new(dim, ineqs, eqs).unwrap()
        },
    )
}

/// A max-affine function with full domain or a domain containing the origin.
pub fn max_affine(n: usize) -> impl Strategy<Value = MaxAffineFunction> {
    (prop::collection::vec((int_vec(n), coef()), 1..5), prop::option::of(hpoly(n))).prop_map(move |(pieces, dom)| {
        let pieces = pieces
            .into_iter()
            .map(|(a, b)| convexcalc_core::calculus::Piece::new(a, Rat::from_integer(b.into())))
            .collect();
        MaxAffineFunction::new(n, pieces, dom.unwrap_or_else(|| HPolyhedron::universe(n))).unwrap()
    })
}
