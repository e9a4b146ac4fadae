//! Affine hulls, relative interiors, images, sums and set comparison.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, CalcError, Result};
use crate::exact::{lp_solve, LpOutcome, Rat, RatVector, Sense};

use super::affine::AffineMap;
use super::cone::Cone;
use super::dd::{dd_convert, dd_convert_back};
use super::hrep::{Constraint, HPolyhedron};
use super::vrep::VPolyhedron;

/// A point of the relative interior together with the rows that are tight on the whole set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiCertificate {
    pub point: RatVector,
    pub implicit_rows: Vec<usize>,
}

/// Rows `i` with `min ⟨aᵢ, x⟩ = bᵢ` over the set.
pub fn implicit_equalities(p: &HPolyhedron) -> Result<Vec<usize>> {
    let Some(start) = p.feasible_point() else {
        return Err(CalcError::EmptySet);
    };
    let m = p.ineqs().len();
    // A row is proved non-implicit by any feasible point where it has slack.
    let mut slack_seen = vec![false; m];
    let mark = |x: &RatVector, seen: &mut Vec<bool>| {
        for (i, c) in p.ineqs().iter().enumerate() {
            if c.slack(x).is_positive() {
                seen[i] = true;
            }
        }
    };
    mark(&start, &mut slack_seen);
    let mut implicit = Vec::new();
    for i in 0..m {
        if slack_seen[i] {
            continue;
        }
        let row = &p.ineqs()[i];
        if row.normal.is_zero() {
            if row.rhs.is_zero() {
                implicit.push(i);
            }
            continue;
        }
        match lp_solve(&row.normal, p, Sense::Minimize)? {
            LpOutcome::Optimal { value, point } => {
                if value == row.rhs {
                    implicit.push(i);
                } else {
                    mark(&point, &mut slack_seen);
                }
            }
            LpOutcome::Unbounded { feasible_point, ray } => {
                // Some point along the ray has slack on this row.
                let probe = feasible_point.add_scaled(&Rat::one(), &ray);
                mark(&feasible_point, &mut slack_seen);
                mark(&probe, &mut slack_seen);
                debug_assert!(slack_seen[i]);
            }
            LpOutcome::Infeasible { .. } => return Err(CalcError::EmptySet),
        }
    }
    Ok(implicit)
}

/// `aff(P)`: the equalities together with the implicit rows turned into equalities.
pub fn affine_hull(p: &HPolyhedron) -> Result<HPolyhedron> {
    let implicit = implicit_equalities(p)?;
    let mut eqs: Vec<Constraint> = p.eqs().to_vec();
    eqs.extend(implicit.iter().map(|&i| p.ineqs()[i].clone()));
    Ok(HPolyhedron::new(p.dim(), Vec::new(), eqs)?.tidy())
}

/// The strict-slack system over several sets in the same space: maximize `t ≤ 1`
/// subject to every non-implicit row holding with slack `t` and every implicit row
/// and equality exactly. Returns the optimal point and `t*`, or `None` if some set is empty.
pub(crate) fn strict_slack(sets: &[(&HPolyhedron, Vec<usize>)], dim: usize) -> Result<Option<(RatVector, Rat)>> {
    let nvar = dim + 1;
    let widen = |c: &Constraint, t_coef: Rat| {
        let mut normal = c.normal.clone();
        normal.push(t_coef);
        Constraint::new(normal, c.rhs.clone())
    };
    let mut ineqs = vec![Constraint::new(RatVector::unit(nvar, dim), Rat::one())];
    let mut eqs = Vec::new();
    for (p, implicit) in sets {
        for (i, c) in p.ineqs().iter().enumerate() {
            if implicit.contains(&i) {
                eqs.push(widen(c, Rat::zero()));
            } else {
                ineqs.push(widen(c, Rat::one()));
            }
        }
        eqs.extend(p.eqs().iter().map(|c| widen(c, Rat::zero())));
    }
    let system = HPolyhedron::new(nvar, ineqs, eqs)?;
    match lp_solve(&RatVector::unit(nvar, dim), &system, Sense::Maximize)? {
        LpOutcome::Optimal { value, point } => Ok(Some((point.slice(0, dim), value))),
        LpOutcome::Unbounded { .. } => Err(CalcError::Internal("strict-slack LP is bounded by t ≤ 1".into())),
        LpOutcome::Infeasible { .. } => Ok(None),
    }
}

/// A point of `ri(P)` with its implicit rows.
pub fn ri_point(p: &HPolyhedron) -> Result<RiCertificate> {
    let implicit = implicit_equalities(p)?;
    let (point, t) = strict_slack(&[(p, implicit.clone())], p.dim())?.ok_or(CalcError::EmptySet)?;
    if !t.is_positive() {
        return Err(CalcError::Internal("relative interior of a nonempty polyhedron is empty".into()));
    }
    Ok(RiCertificate { point, implicit_rows: implicit })
}

pub fn ri_contains(p: &HPolyhedron, x: &RatVector) -> Result<bool> {
    check_dim(p.dim(), x.dim())?;
    if !p.contains(x)? {
        return Ok(false);
    }
    let implicit = implicit_equalities(p)?;
    Ok(p.ineqs().iter().enumerate().all(|(i, c)| implicit.contains(&i) || c.slack(x).is_positive()))
}

/// A point of `⋂ ri(Pᵢ)` if that intersection is nonempty.
pub fn joint_ri_point(sets: &[HPolyhedron]) -> Result<Option<RatVector>> {
    let Some(first) = sets.first() else {
        return Err(CalcError::Internal("joint relative interior of no sets".into()));
    };
    let dim = first.dim();
    let mut tagged = Vec::with_capacity(sets.len());
    for p in sets {
        check_dim(dim, p.dim())?;
        match implicit_equalities(p) {
            Ok(implicit) => tagged.push((p, implicit)),
            Err(CalcError::EmptySet) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(strict_slack(&tagged, dim)?.filter(|(_, t)| t.is_positive()).map(|(x, _)| x))
}

pub fn joint_ri_nonempty(sets: &[HPolyhedron]) -> Result<bool> {
    Ok(joint_ri_point(sets)?.is_some())
}

pub fn intersect(sets: &[HPolyhedron]) -> Result<HPolyhedron> {
    let Some(first) = sets.first() else {
        return Err(CalcError::Internal("intersection of no sets".into()));
    };
    let mut out = first.clone();
    for p in &sets[1..] {
        out = out.intersect(p)?;
    }
    Ok(out)
}

/// Image under `B`: points through `B`, directions through its linear part.
pub fn linear_image(map: &AffineMap, v: &VPolyhedron) -> Result<VPolyhedron> {
    check_dim(map.input_dim(), v.dim())?;
    let out_dim = map.output_dim();
    if v.is_empty() {
        return Ok(VPolyhedron::empty(out_dim));
    }
    let points = v.points().iter().map(|p| map.apply(p)).collect::<Result<Vec<_>>>()?;
    let rays = v.rays().iter().map(|r| map.apply_linear(r)).collect::<Result<Vec<_>>>()?;
    let lineality = v.lineality().iter().map(|l| map.apply_linear(l)).collect::<Result<Vec<_>>>()?;
    VPolyhedron::new(out_dim, points, rays, lineality)
}

pub fn minkowski_sum(a: &VPolyhedron, b: &VPolyhedron) -> Result<VPolyhedron> {
    check_dim(a.dim(), b.dim())?;
    if a.is_empty() || b.is_empty() {
        return Ok(VPolyhedron::empty(a.dim()));
    }
    let mut points = Vec::with_capacity(a.points().len() * b.points().len());
    for p in a.points() {
        for q in b.points() {
            points.push(p + q);
        }
    }
    let rays = a.rays().iter().chain(b.rays()).cloned().collect();
    let lineality = a.lineality().iter().chain(b.lineality()).cloned().collect();
    VPolyhedron::new(a.dim(), points, rays, lineality)
}

/// `A − B = A + (−B)`.
pub fn minkowski_diff(a: &VPolyhedron, b: &VPolyhedron) -> Result<VPolyhedron> {
    minkowski_sum(a, &b.negated())
}

/// Closed convex hull of a union: generator lists concatenated.
pub fn convex_hull_union(sets: &[VPolyhedron]) -> Result<VPolyhedron> {
    let Some(first) = sets.first() else {
        return Err(CalcError::Internal("hull of no sets".into()));
    };
    let dim = first.dim();
    let mut points = Vec::new();
    let mut rays = Vec::new();
    let mut lineality = Vec::new();
    for s in sets {
        check_dim(dim, s.dim())?;
        if s.is_empty() {
            continue;
        }
        points.extend(s.points().iter().cloned());
        rays.extend(s.rays().iter().cloned());
        lineality.extend(s.lineality().iter().cloned());
    }
    VPolyhedron::new(dim, points, rays, lineality)
}

/// Orthogonal projection onto the coordinates in `keep` (in the given order).
pub fn project_coords(v: &VPolyhedron, keep: &[usize]) -> Result<VPolyhedron> {
    if let Some(&bad) = keep.iter().find(|&&i| i >= v.dim()) {
        return Err(CalcError::BadIndex { index: bad, dim: v.dim() });
    }
    let pick = |list: &[RatVector]| list.iter().map(|x| x.select(keep)).collect::<Vec<_>>();
    VPolyhedron::new(keep.len(), pick(v.points()), pick(v.rays()), pick(v.lineality()))
}

/// Projection of an H-polyhedron onto a coordinate subset, returned in H-form.
pub fn project_h(p: &HPolyhedron, keep: &[usize]) -> Result<HPolyhedron> {
    let v = dd_convert(p)?;
    dd_convert_back(&project_coords(&v, keep)?)
}

/// Irredundant generators of the same set.
pub fn minimize_v(v: &VPolyhedron) -> Result<VPolyhedron> {
    dd_convert(&dd_convert_back(v)?)
}

/// Irredundant rows of the same set.
pub fn minimize_h(p: &HPolyhedron) -> Result<HPolyhedron> {
    dd_convert_back(&dd_convert(p)?)
}

/// `V ∩ W` through the inequality forms.
pub fn intersect_v(a: &VPolyhedron, b: &VPolyhedron) -> Result<VPolyhedron> {
    check_dim(a.dim(), b.dim())?;
    dd_convert(&dd_convert_back(a)?.intersect(&dd_convert_back(b)?)?)
}

/// Polyhedral data accepted by the comparison routines in either representation.
pub trait PolyhedralSet {
    fn set_dim(&self) -> usize;
    fn to_h(&self) -> Result<HPolyhedron>;
    fn to_v(&self) -> Result<VPolyhedron>;
}

impl PolyhedralSet for HPolyhedron {
    fn set_dim(&self) -> usize {
        self.dim()
    }

    fn to_h(&self) -> Result<HPolyhedron> {
        Ok(self.clone())
    }

    fn to_v(&self) -> Result<VPolyhedron> {
        dd_convert(self)
    }
}

impl PolyhedralSet for VPolyhedron {
    fn set_dim(&self) -> usize {
        self.dim()
    }

    fn to_h(&self) -> Result<HPolyhedron> {
        dd_convert_back(self)
    }

    fn to_v(&self) -> Result<VPolyhedron> {
        Ok(self.clone())
    }
}

impl PolyhedralSet for Cone {
    fn set_dim(&self) -> usize {
        self.dim()
    }

    fn to_h(&self) -> Result<HPolyhedron> {
        dd_convert_back(&self.to_vpolyhedron())
    }

    fn to_v(&self) -> Result<VPolyhedron> {
        Ok(self.to_vpolyhedron())
    }
}

/// A member of `v` outside `h`, if any.
pub fn escape_witness(v: &VPolyhedron, h: &HPolyhedron) -> Result<Option<RatVector>> {
    check_dim(h.dim(), v.dim())?;
    for p in v.points() {
        if !h.contains(p)? {
            return Ok(Some(p.clone()));
        }
    }
    let Some(p0) = v.points().first() else {
        return Ok(None);
    };
    for d in v.directions() {
        for c in h.ineqs() {
            let rate = c.normal.dot(&d);
            if rate.is_positive() {
                // Smallest integer step t ≥ 1 with ⟨a, p₀ + t·d⟩ > b.
                let need = (c.slack(p0) / &rate).floor() + Rat::one();
                let t = if need < Rat::one() { Rat::one() } else { need };
                return Ok(Some(p0.add_scaled(&t, &d)));
            }
        }
        if h.eqs().iter().any(|c| !c.normal.dot(&d).is_zero()) {
            return Ok(Some(p0 + &d));
        }
    }
    Ok(None)
}

pub fn is_subset(a: &impl PolyhedralSet, b: &impl PolyhedralSet) -> Result<bool> {
    check_dim(a.set_dim(), b.set_dim())?;
    Ok(escape_witness(&a.to_v()?, &b.to_h()?)?.is_none())
}

/// Mutual inclusion.
pub fn set_equal(a: &impl PolyhedralSet, b: &impl PolyhedralSet) -> Result<bool> {
    Ok(is_subset(a, b)? && is_subset(b, a)?)
}
