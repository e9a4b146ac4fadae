use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, CalcError, Result};
use crate::exact::{lp_solve, LpOutcome, Rat, RatVector, Sense};
use crate::polyhedron::{ri_point, HPolyhedron, VPolyhedron};

use super::function::MaxAffineFunction;
use super::normal::normal_cone;

/// `∂f(x̄)` read off an epigraph: `{v | (v, −1) ∈ N((x̄, f(x̄)); epi)}`.
pub(crate) fn slice_epigraph_normals(epi: &HPolyhedron, point: &RatVector) -> Result<VPolyhedron> {
    let n = epi.dim() - 1;
    let cone = normal_cone(epi, point)?;
    let mut points = Vec::new();
    let mut rays = Vec::new();
    for g in cone.generators() {
        let last = &g[n];
        if last.is_negative() {
            points.push(g.slice(0, n).scale(&(-Rat::one() / last)));
        } else if last.is_zero() {
            rays.push(g.slice(0, n));
        } else {
            return Err(CalcError::Internal("epigraph normal with positive last coordinate".into()));
        }
    }
    let mut lineality = Vec::new();
    for l in cone.lineality() {
        if !l[n].is_zero() {
            return Err(CalcError::Internal("epigraph normal lineality leaves the horizontal hyperplane".into()));
        }
        lineality.push(l.slice(0, n));
    }
    VPolyhedron::new(n, points, rays, lineality)
}

/// `∂f(x̄)` through the normal cone of the epigraph at `(x̄, f(x̄))`.
pub fn subdifferential(f: &MaxAffineFunction, x: &RatVector) -> Result<VPolyhedron> {
    check_dim(f.n(), x.dim())?;
    let fx = f.value_in_domain(x)?;
    let mut point = x.clone();
    point.push(fx);
    slice_epigraph_normals(&f.epigraph(), &point)
}

/// `0 ∈ ∂f(x̄)`.
pub fn fermat_check(f: &MaxAffineFunction, x: &RatVector) -> Result<bool> {
    subdifferential(f, x)?.contains(&RatVector::zeros(f.n()))
}

/// `inf f` by an LP over the epigraph: the minimizer and value, or `None` when unbounded below.
pub fn minimize(f: &MaxAffineFunction) -> Result<Option<(RatVector, Rat)>> {
    let n = f.n();
    match lp_solve(&RatVector::unit(n + 1, n), &f.epigraph(), Sense::Minimize)? {
        LpOutcome::Optimal { value, point } => Ok(Some((point.slice(0, n), value))),
        LpOutcome::Unbounded { .. } => Ok(None),
        LpOutcome::Infeasible { .. } => Err(CalcError::EmptySet),
    }
}

/// Whether `∂f` is nonempty at a relative interior point of the domain.
pub fn subdiff_nonempty_on_ri(f: &MaxAffineFunction) -> Result<bool> {
    let x = ri_point(f.domain())?.point;
    Ok(!subdifferential(f, &x)?.is_empty())
}

/// Definitional test `f(x) ≥ f(x̄) + ⟨v, x − x̄⟩ ∀x` by minimizing `t − ⟨v, x⟩` over the epigraph.
pub fn oracle_subgradient(v: &RatVector, f: &MaxAffineFunction, x: &RatVector) -> Result<bool> {
    check_dim(f.n(), v.dim())?;
    check_dim(f.n(), x.dim())?;
    let fx = f.value_in_domain(x)?;
    let mut objective = -v;
    objective.push(Rat::one());
    match lp_solve(&objective, &f.epigraph(), Sense::Minimize)? {
        LpOutcome::Optimal { value, .. } => Ok(value == fx - v.dot(x)),
        LpOutcome::Unbounded { .. } => Ok(false),
        LpOutcome::Infeasible { .. } => Err(CalcError::Internal("epigraph of a proper function reported empty".into())),
    }
}

/// `co{aᵢ : i ∈ I(x̄)} + N(x̄; dom f)`, with the normal cone taken by the polar route.
pub fn closed_form_subdiff(f: &MaxAffineFunction, x: &RatVector) -> Result<VPolyhedron> {
    check_dim(f.n(), x.dim())?;
    let active = f.active_set(x)?;
    let points: Vec<RatVector> = active.iter().map(|&i| f.pieces()[i].a.clone()).collect();
    let cone = super::normal::normal_cone_polar(f.domain(), x)?;
    VPolyhedron::new(f.n(), points, cone.generators().to_vec(), cone.lineality().to_vec())
}
