//! Double description conversion between inequality and generator form.
//!
//! Both directions reduce to enumerating the extreme rays and lineality space of
//! a polyhedral cone `{z | gᵢ·z ≤ 0, hⱼ·z = 0}` with the incremental Motzkin
//! scheme. Lineality is carried explicitly; adjacency of ray pairs uses the
//! combinatorial zero-set test.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::error::{CalcError, Result};
use crate::exact::{Rat, RatMatrix, RatVector};

use super::hrep::{Constraint, HPolyhedron};
use super::vrep::VPolyhedron;

pub const DEFAULT_DIM_CAP: usize = 8;
pub const DIM_CAP_ENV: &str = "CONVEXCALC_DIM_CAP";

/// Largest ambient dimension accepted by the conversions; `CONVEXCALC_DIM_CAP` overrides the default.
pub fn dim_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(DIM_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_DIM_CAP)
    })
}

fn check_cap(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(CalcError::DimensionCapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64).max(1)])
    }

    fn full(bits: usize, len: usize) -> Self {
        let mut s = Self::new(bits);
        for i in 0..len {
            s.set(i);
        }
        s
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: RatVector,
    zeros: BitSet,
}

/// Extreme rays and a lineality basis of a polyhedral cone.
#[derive(Clone, Debug, Default)]
pub(crate) struct ConeGenerators {
    pub rays: Vec<RatVector>,
    pub lineality: Vec<RatVector>,
}

/// Generators of `{z ∈ ℚᵈ | g·z ≤ 0 ∀g ∈ ineqs, h·z = 0 ∀h ∈ eqs}`.
pub(crate) fn cone_generators(dim: usize, ineqs: &[RatVector], eqs: &[RatVector]) -> ConeGenerators {
    let total = ineqs.len() + eqs.len();
    let mut lineality: Vec<RatVector> = (0..dim).map(|i| RatVector::unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();

    let rows = eqs.iter().map(|g| (g, true)).chain(ineqs.iter().map(|g| (g, false)));
    for (k, (g, is_eq)) in rows.enumerate() {
        if g.is_zero() {
            for r in rays.iter_mut() {
                r.zeros.set(k);
            }
            continue;
        }

        if let Some(idx) = lineality.iter().position(|l| !g.dot(l).is_zero()) {
            let mut pivot = lineality.remove(idx);
            let mut gp = g.dot(&pivot);
            if gp.is_positive() {
                pivot = -pivot;
                gp = -gp;
            }
            for l in lineality.iter_mut() {
                let gl = g.dot(l);
                if !gl.is_zero() {
                    *l = l.add_scaled(&(-(gl / &gp)), &pivot).primitive();
                }
            }
            for r in rays.iter_mut() {
                let gr = g.dot(&r.v);
                if !gr.is_zero() {
                    r.v = r.v.add_scaled(&(-(gr / &gp)), &pivot).primitive();
                }
                r.zeros.set(k);
            }
            if !is_eq {
                rays.push(Ray { v: pivot.primitive(), zeros: BitSet::full(total, k) });
            }
            continue;
        }

        let values: Vec<Rat> = rays.iter().map(|r| g.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();

        let mut created: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                let adjacent =
                    (0..rays.len()).all(|o| o == p || o == n || !common.is_subset(&rays[o].zeros));
                if !adjacent {
                    continue;
                }
                let v = rays[n].v.scale(&values[p]).add_scaled(&(-&values[n]), &rays[p].v).primitive();
                let mut zeros = common;
                zeros.set(k);
                created.push(Ray { v, zeros });
            }
        }

        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if values[i].is_zero() {
                r.zeros.set(k);
                kept.push(r);
            } else if values[i].is_negative() && !is_eq {
                kept.push(r);
            }
        }
        kept.extend(created);
        rays = kept;
    }

    // Rays are reported modulo the lineality space, reduced against its echelon basis.
    let mut out = ConeGenerators::default();
    let (basis, pivots) = if lineality.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let (m, piv) = RatMatrix::new(lineality, dim).expect("lineality rows have the cone dimension").rref();
        (m.rows()[..piv.len()].to_vec(), piv)
    };
    for r in rays {
        let mut v = r.v;
        for (row, &col) in basis.iter().zip(&pivots) {
            if !v[col].is_zero() {
                let f = -v[col].clone();
                v = v.add_scaled(&f, row);
            }
        }
        if v.is_zero() {
            continue;
        }
        let v = v.primitive();
        if !out.rays.contains(&v) {
            out.rays.push(v);
        }
    }
    out.lineality = basis.into_iter().map(|l| l.line_canonical()).collect();
    out
}

/// H- to V-representation; the output is irredundant.
pub fn dd_convert(p: &HPolyhedron) -> Result<VPolyhedron> {
    let n = p.dim();
    check_cap(n)?;
    let homog = |c: &Constraint| {
        let mut z = c.normal.clone();
        z.push(-c.rhs.clone());
        z
    };
    let mut ineqs: Vec<RatVector> = Vec::with_capacity(p.ineqs().len() + 1);
    ineqs.push(-RatVector::unit(n + 1, n));
    ineqs.extend(p.ineqs().iter().map(homog));
    let eqs: Vec<RatVector> = p.eqs().iter().map(homog).collect();
    let gens = cone_generators(n + 1, &ineqs, &eqs);

    let mut points = Vec::new();
    let mut rays = Vec::new();
    for r in gens.rays {
        let t = r[n].clone();
        let x = r.slice(0, n);
        if t.is_positive() {
            points.push(x.scale(&(Rat::from_integer(1.into()) / t)));
        } else {
            debug_assert!(t.is_zero());
            rays.push(x);
        }
    }
    if points.is_empty() {
        return Ok(VPolyhedron::empty(n));
    }
    let lineality: Vec<RatVector> = gens
        .lineality
        .into_iter()
        .map(|l| {
            debug_assert!(l[n].is_zero());
            l.slice(0, n)
        })
        .collect();
    VPolyhedron::new(n, points, rays, lineality)
}

/// V- to H-representation; the output has no redundant rows.
pub fn dd_convert_back(v: &VPolyhedron) -> Result<HPolyhedron> {
    let n = v.dim();
    check_cap(n)?;
    if v.is_empty() {
        return Ok(HPolyhedron::empty(n));
    }
    let lift = |x: &RatVector, t: i64| {
        let mut z = x.clone();
        z.push(Rat::from_integer(t.into()));
        z
    };
    let mut ineqs: Vec<RatVector> = v.points().iter().map(|p| lift(p, 1)).collect();
    ineqs.extend(v.rays().iter().map(|r| lift(r, 0)));
    let eqs: Vec<RatVector> = v.lineality().iter().map(|l| lift(l, 0)).collect();
    let gens = cone_generators(n + 1, &ineqs, &eqs);

    let mut rows = Vec::new();
    for y in gens.rays {
        let a = y.slice(0, n);
        if a.is_zero() {
            continue;
        }
        rows.push(Constraint::new(a, -y[n].clone()).primitive());
    }
    let mut equalities = Vec::new();
    for y in gens.lineality {
        let a = y.slice(0, n);
        debug_assert!(!a.is_zero());
        equalities.push(Constraint::new(a, -y[n].clone()).primitive());
    }
    HPolyhedron::new(n, rows, equalities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;

    fn sorted(mut v: Vec<RatVector>) -> Vec<RatVector> {
        v.sort();
        v
    }

    #[test]
    fn unit_triangle_vertices() {
        let h = HPolyhedron::from_ints(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 1)], &[]);
        let v = dd_convert(&h).unwrap();
        assert_eq!(
            sorted(v.points().to_vec()),
            sorted(vec![RatVector::from_ints(&[0, 0]), RatVector::from_ints(&[1, 0]), RatVector::from_ints(&[0, 1])])
        );
        assert!(v.is_bounded());
    }

    #[test]
    fn halfplane_generators() {
        let h = HPolyhedron::from_ints(2, &[(&[-1, 0], 0)], &[]);
        let v = dd_convert(&h).unwrap();
        assert_eq!(v.points(), &[RatVector::from_ints(&[0, 0])]);
        assert_eq!(v.rays(), &[RatVector::from_ints(&[1, 0])]);
        assert_eq!(v.lineality(), &[RatVector::from_ints(&[0, 1])]);
    }

    #[test]
    fn segment_back_to_rows() {
        let v = VPolyhedron::from_points(1, vec![RatVector::from_ints(&[0]), RatVector::from_ints(&[1])]).unwrap();
        let h = dd_convert_back(&v).unwrap();
        assert!(h.eqs().is_empty());
        let mut rows: Vec<(RatVector, Rat)> = h.ineqs().iter().map(|c| (c.normal.clone(), c.rhs.clone())).collect();
        rows.sort();
        assert_eq!(rows, vec![(RatVector::from_ints(&[-1]), int(0)), (RatVector::from_ints(&[1]), int(1))]);
    }

    #[test]
    fn infeasible_converts_to_empty() {
        let h = HPolyhedron::from_ints(1, &[(&[1], -1), (&[-1], 0)], &[]);
        assert!(dd_convert(&h).unwrap().is_empty());
    }

    #[test]
    fn equalities_and_lineality() {
        // {x₁ + x₂ = 1, x₃ free} in ℚ³: a line of points times a free axis.
        let h = HPolyhedron::from_ints(3, &[], &[(&[1, 1, 0], 1)]);
        let v = dd_convert(&h).unwrap();
        assert_eq!(v.points().len(), 1);
        assert!(v.rays().is_empty());
        assert_eq!(v.lineality().len(), 2);
        let back = dd_convert_back(&v).unwrap();
        assert!(back.ineqs().is_empty());
        assert_eq!(back.eqs().len(), 1);
    }

    #[test]
    fn cube_has_eight_vertices() {
        let mut ineqs: Vec<(Vec<i64>, i64)> = Vec::new();
        for i in 0..3 {
            let mut a = vec![0; 3];
            a[i] = 1;
            ineqs.push((a.clone(), 1));
            a[i] = -1;
            ineqs.push((a, 1));
        }
        let rows: Vec<(&[i64], i64)> = ineqs.iter().map(|(a, b)| (a.as_slice(), *b)).collect();
        let h = HPolyhedron::from_ints(3, &rows, &[]);
        let v = dd_convert(&h).unwrap();
        assert_eq!(v.points().len(), 8);
        let back = dd_convert_back(&v).unwrap();
        assert_eq!(back.ineqs().len(), 6);
    }
}
