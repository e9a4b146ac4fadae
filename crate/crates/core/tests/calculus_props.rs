mod common;

use common::*;
use convexcalc_core::calculus::{
    closed_form_subdiff, fermat_check, minimize, normal_cone, normal_cone_polar, oracle_normal_membership,
    oracle_subgradient, subdifferential,
};
use convexcalc_core::exact::{Rat, RatMatrix, RatVector};
use convexcalc_core::polyhedron::{ri_contains, ri_point, set_equal, AffineMap, VPolyhedron};
use convexcalc_core::setvalued::{coderivative, PolyhedralMap};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_cone_generators_pass_the_oracle(h in hpoly(3), v in int_vec(3)) {
        let x = RatVector::zeros(3);
        let cone = normal_cone(&h, &x).unwrap();
        prop_assert!(set_equal(&cone.to_vpolyhedron(), &normal_cone_polar(&h, &x).unwrap().to_vpolyhedron()).unwrap());
        for g in cone.to_vpolyhedron().directions() {
            prop_assert!(oracle_normal_membership(&g, &h, &x).unwrap());
        }
        prop_assert_eq!(oracle_normal_membership(&v, &h, &x).unwrap(), cone.contains(&v).unwrap());
    }

    #[test]
    fn epigraph_route_matches_closed_form(f in max_affine(2), probe in int_vec(2)) {
        let x = RatVector::zeros(2);
        let sub = subdifferential(&f, &x).unwrap();
        prop_assert!(set_equal(&sub, &closed_form_subdiff(&f, &x).unwrap()).unwrap());
        for m in sub.sample_members() {
            prop_assert!(oracle_subgradient(&m, &f, &x).unwrap());
        }
        prop_assert_eq!(oracle_subgradient(&probe, &f, &x).unwrap(), sub.contains(&probe).unwrap());
    }

    #[test]
    fn epigraph_normals_point_downward(f in max_affine(2)) {
        let x = RatVector::zeros(2);
        let mut top = x.clone();
        top.push(f.value(&x).unwrap().unwrap());
        let cone = normal_cone(&f.epigraph(), &top).unwrap();
        for g in cone.generators() {
            prop_assert!(!g[2].is_positive());
        }
        for l in cone.lineality() {
            prop_assert!(l[2].is_zero());
        }
    }

    #[test]
    fn relative_interior_of_the_epigraph(f in max_affine(2)) {
        let x = ri_point(f.domain()).unwrap().point;
        let value = f.value(&x).unwrap().unwrap();
        let epi = f.epigraph();
        let mut above = x.clone();
        above.push(&value + Rat::one());
        let mut on = x.clone();
        on.push(value);
        prop_assert!(ri_contains(&epi, &above).unwrap());
        prop_assert!(!ri_contains(&epi, &on).unwrap());
    }

    #[test]
    fn minimizers_satisfy_fermat(f in max_affine(2)) {
        if let Some((x, value)) = minimize(&f).unwrap() {
            prop_assert!(fermat_check(&f, &x).unwrap());
            prop_assert_eq!(f.value(&x).unwrap(), Some(value));
        } else {
            prop_assert!(!fermat_check(&f, &RatVector::zeros(2)).unwrap());
        }
    }

    #[test]
    fn affine_coderivative_is_the_adjoint(rows in prop::collection::vec(int_vec(2), 1..4), b in int_vec(3), x in int_vec(2), v in int_vec(3)) {
        let p = rows.len();
        let a = RatMatrix::new(rows, 2).unwrap();
        let map = AffineMap::new(a.clone(), b.slice(0, p)).unwrap();
        let f = PolyhedralMap::from_affine(&map);
        let y = map.apply(&x).unwrap();
        let v = v.slice(0, p);
        let d = coderivative(&f, &x, &y, &v).unwrap();
        let adjoint = a.transpose().mul_vec(&v).unwrap();
        prop_assert!(set_equal(&d, &VPolyhedron::point(adjoint)).unwrap());
    }
}
