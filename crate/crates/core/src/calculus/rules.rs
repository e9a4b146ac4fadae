use num_traits::Zero;

use crate::error::{check_dim, CalcError, Result};
use crate::exact::RatVector;
use crate::polyhedron::ops::strict_slack;
use crate::polyhedron::{
    convex_hull_union, implicit_equalities, intersect, joint_ri_nonempty, linear_image, minimize_h, minkowski_sum,
    AffineMap, Cone, HPolyhedron, VPolyhedron,
};

use super::function::MaxAffineFunction;
use super::normal::normal_cone;
use super::report::RuleReport;
use super::subdiff::subdifferential;

/// `N(x̄; ⋂Pᵢ)` against `Σ N(x̄; Pᵢ)`.
///
/// The left side is computed on an irredundant description of the intersection, so
/// it does not simply restate the concatenated rows of the right side.
pub fn intersection_rule(sets: &[HPolyhedron], x: &RatVector) -> Result<RuleReport> {
    let Some(first) = sets.first() else {
        return Err(CalcError::Internal("intersection rule needs at least one set".into()));
    };
    let mut rhs = Cone::origin(first.dim());
    for p in sets {
        check_dim(first.dim(), p.dim())?;
        rhs = rhs.sum(&normal_cone(p, x)?)?;
    }
    let lhs = normal_cone(&minimize_h(&intersect(sets)?)?, x)?;
    RuleReport::from_cones("intersection", &lhs, &rhs, joint_ri_nonempty(sets)?)
}

fn check_in_domains(fs: &[MaxAffineFunction], x: &RatVector) -> Result<()> {
    for f in fs {
        check_dim(f.n(), x.dim())?;
        if !f.in_domain(x)? {
            return Err(CalcError::PointOutsideDomain);
        }
    }
    Ok(())
}

/// `∂(Σfᵢ)(x̄)` against `Σ∂fᵢ(x̄)`.
pub fn sum_rule(fs: &[MaxAffineFunction], x: &RatVector) -> Result<RuleReport> {
    check_in_domains(fs, x)?;
    let total = MaxAffineFunction::sum(fs)?;
    let lhs = subdifferential(&total, x)?;
    let mut rhs = VPolyhedron::point(RatVector::zeros(x.dim()));
    for f in fs {
        rhs = minkowski_sum(&rhs, &subdifferential(f, x)?)?;
    }
    let domains: Vec<HPolyhedron> = fs.iter().map(|f| f.domain().clone()).collect();
    RuleReport::build("sum", lhs, rhs, joint_ri_nonempty(&domains)?)
}

/// Whether the range of `B` meets `ri(dom f)`.
pub fn range_meets_ri(f: &MaxAffineFunction, map: &AffineMap) -> Result<bool> {
    let implicit = match implicit_equalities(f.domain()) {
        Ok(rows) => rows,
        Err(CalcError::EmptySet) => return Ok(false),
        Err(e) => return Err(e),
    };
    // Row order is preserved by the pullback, so the implicit rows of dom f index it directly.
    let pulled = f.domain().preimage(map)?;
    Ok(strict_slack(&[(&pulled, implicit)], map.input_dim())?.is_some_and(|(_, t)| t > num_traits::zero()))
}

/// `∂(f∘B)(x̄)` against `Aᵀ∂f(B x̄)`.
pub fn chain_rule_affine(f: &MaxAffineFunction, map: &AffineMap, x: &RatVector) -> Result<RuleReport> {
    check_dim(map.input_dim(), x.dim())?;
    let y = map.apply(x)?;
    check_dim(f.n(), y.dim())?;
    if !f.in_domain(&y)? {
        return Err(CalcError::PointOutsideDomain);
    }
    let lhs = subdifferential(&f.compose_affine(map)?, x)?;
    let rhs = linear_image(&map.adjoint(), &subdifferential(f, &y)?)?;
    RuleReport::build("chain", lhs, rhs, range_meets_ri(f, map)?)
}

/// `∂(max fᵢ)(x̄)` against `co ⋃_{i ∈ I(x̄)} ∂fᵢ(x̄)`; requires `x̄` interior to every domain.
pub fn max_rule(fs: &[MaxAffineFunction], x: &RatVector) -> Result<RuleReport> {
    check_in_domains(fs, x)?;
    for f in fs {
        if !f.domain().is_interior(x)? {
            return Err(CalcError::ContinuityHypothesisUnverifiable);
        }
    }
    let total = MaxAffineFunction::max_of(fs)?;
    let fx = total.value_in_domain(x)?;
    let lhs = subdifferential(&total, x)?;
    let mut parts = Vec::new();
    for f in fs {
        if f.value_in_domain(x)? == fx {
            parts.push(subdifferential(f, x)?);
        }
    }
    let rhs = convex_hull_union(&parts)?;
    RuleReport::build("max", lhs, rhs, true)
}

/// Indices `i` with `fᵢ(x̄) = max_j f_j(x̄)`.
pub fn active_functions(fs: &[MaxAffineFunction], x: &RatVector) -> Result<Vec<usize>> {
    check_in_domains(fs, x)?;
    let values = fs.iter().map(|f| f.value_in_domain(x)).collect::<Result<Vec<_>>>()?;
    let top = values.iter().max().cloned().unwrap_or_else(Zero::zero);
    Ok((0..fs.len()).filter(|&i| values[i] == top).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::report::Verdict;
    use crate::exact::RatMatrix;
    use crate::polyhedron::set_equal;

    fn interval(lo: i64, hi: i64) -> VPolyhedron {
        VPolyhedron::from_points(1, vec![RatVector::from_ints(&[lo]), RatVector::from_ints(&[hi])]).unwrap()
    }

    #[test]
    fn intersection_examples() {
        let a = HPolyhedron::from_ints(2, &[(&[-1, 0], 0)], &[]);
        let b = HPolyhedron::from_ints(2, &[(&[0, -1], 0)], &[]);
        let r = intersection_rule(&[a, b], &RatVector::zeros(2)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(r.qualification_holds);
        let expected = Cone::new(2, vec![RatVector::from_ints(&[-1, 0]), RatVector::from_ints(&[0, -1])], vec![]).unwrap();
        assert!(set_equal(&r.lhs, &expected).unwrap());

        let r = intersection_rule(&[HPolyhedron::universe(3), HPolyhedron::universe(3)], &RatVector::zeros(3)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(r.lhs.is_origin());
    }

    #[test]
    fn line_and_halfline() {
        let omega1 = HPolyhedron::from_ints(2, &[], &[(&[0, 1], 0)]);
        let omega2 = HPolyhedron::from_ints(2, &[(&[1, 0], 0)], &[(&[0, 1], 0)]);
        let r = intersection_rule(&[omega1, omega2], &RatVector::zeros(2)).unwrap();
        assert!(r.qualification_holds);
        assert_eq!(r.verdict, Verdict::Equal);
    }

    #[test]
    fn sum_examples() {
        let f1 = MaxAffineFunction::from_ints(1, &[(&[1], 0), (&[-1], 0)]);
        let f2 = MaxAffineFunction::from_ints(1, &[(&[1], -1), (&[-1], 1)]);
        let r = sum_rule(&[f1.clone(), f2], &RatVector::zeros(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(set_equal(&r.lhs, &interval(-2, 0)).unwrap());

        let zero = MaxAffineFunction::from_ints(1, &[(&[0], 0)]);
        let r = sum_rule(&[f1.clone(), zero], &RatVector::zeros(1)).unwrap();
        assert!(set_equal(&r.rhs, &interval(-1, 1)).unwrap());

        let o1 = HPolyhedron::from_ints(2, &[(&[-1, 0], 0)], &[]);
        let o2 = HPolyhedron::from_ints(2, &[(&[0, -1], 0)], &[]);
        let x = RatVector::zeros(2);
        let via_sum =
            sum_rule(&[MaxAffineFunction::indicator(o1.clone()), MaxAffineFunction::indicator(o2.clone())], &x).unwrap();
        let via_cones = intersection_rule(&[o1, o2], &x).unwrap();
        assert!(set_equal(&via_sum.lhs, &via_cones.lhs).unwrap());
        assert!(set_equal(&via_sum.rhs, &via_cones.rhs).unwrap());
    }

    #[test]
    fn chain_examples() {
        let f = MaxAffineFunction::from_ints(1, &[(&[1], 0), (&[0], 0)]);
        let b = AffineMap::linear(RatMatrix::from_ints(&[&[1, 1]]));
        let r = chain_rule_affine(&f, &b, &RatVector::zeros(2)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        let seg = VPolyhedron::from_points(2, vec![RatVector::zeros(2), RatVector::from_ints(&[1, 1])]).unwrap();
        assert!(set_equal(&r.lhs, &seg).unwrap());

        let g = MaxAffineFunction::from_ints(2, &[(&[1, 0], 0), (&[0, 1], 0)]);
        let r = chain_rule_affine(&g, &AffineMap::identity(2), &RatVector::zeros(2)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(r.qualification_holds);
    }

    #[test]
    fn chain_qualification_with_zero_map() {
        let dom = HPolyhedron::from_ints(1, &[(&[-1], 0)], &[]);
        let f = MaxAffineFunction::indicator(dom);
        let zero = AffineMap::linear(RatMatrix::from_ints(&[&[0, 0]]));
        let r = chain_rule_affine(&f, &zero, &RatVector::zeros(2)).unwrap();
        assert!(!r.qualification_holds);
        let shifted = AffineMap::new(RatMatrix::from_ints(&[&[0, 0]]), RatVector::from_ints(&[1])).unwrap();
        let r = chain_rule_affine(&f, &shifted, &RatVector::zeros(2)).unwrap();
        assert!(r.qualification_holds);
        assert_eq!(r.verdict, Verdict::Equal);
    }

    #[test]
    fn max_examples() {
        let f1 = MaxAffineFunction::from_ints(1, &[(&[1], 0)]);
        let f2 = MaxAffineFunction::from_ints(1, &[(&[-1], 0)]);
        let r = max_rule(&[f1.clone(), f2], &RatVector::zeros(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(set_equal(&r.rhs, &interval(-1, 1)).unwrap());

        let r = max_rule(&[f1.clone()], &RatVector::from_ints(&[3])).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);

        let f3 = MaxAffineFunction::from_ints(1, &[(&[1], -1)]);
        assert_eq!(active_functions(&[f1.clone(), f3.clone()], &RatVector::zeros(1)).unwrap(), vec![0]);
        let r = max_rule(&[f1.clone(), f3], &RatVector::zeros(1)).unwrap();
        assert!(set_equal(&r.lhs, &interval(1, 1)).unwrap());

        let bounded = f1.with_domain(HPolyhedron::from_ints(1, &[(&[1], 0)], &[])).unwrap();
        assert_eq!(max_rule(&[bounded], &RatVector::zeros(1)), Err(CalcError::ContinuityHypothesisUnverifiable));
    }
}
