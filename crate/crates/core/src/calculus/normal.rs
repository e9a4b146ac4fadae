use num_traits::Zero;

use crate::error::{check_dim, CalcError, Result};
use crate::exact::{lp_solve, LpOutcome, RatVector, Sense};
use crate::polyhedron::{dd_convert, Constraint, Cone, HPolyhedron};

/// `N(x̄; P)`: the active inequality normals generate, the equality normals span the lineality.
pub fn normal_cone(p: &HPolyhedron, x: &RatVector) -> Result<Cone> {
    check_dim(p.dim(), x.dim())?;
    if !p.contains(x)? {
        return Err(CalcError::PointOutsideSet);
    }
    let generators: Vec<RatVector> = p.active_rows(x).into_iter().map(|i| p.ineqs()[i].normal.clone()).collect();
    let lineality: Vec<RatVector> = p.eqs().iter().map(|c| c.normal.clone()).collect();
    Cone::new(p.dim(), generators, lineality)
}

/// `N(x̄; P)` as the polar of the tangent cone spanned by the generators of `P − x̄`.
///
/// Shares no code path with [`normal_cone`] beyond the double description conversion,
/// so the two serve as cross-checks of one another.
pub fn normal_cone_polar(p: &HPolyhedron, x: &RatVector) -> Result<Cone> {
    check_dim(p.dim(), x.dim())?;
    if !p.contains(x)? {
        return Err(CalcError::PointOutsideSet);
    }
    let v = dd_convert(p)?;
    let zero = crate::exact::Rat::zero();
    let mut ineqs: Vec<Constraint> = Vec::new();
    for q in v.points() {
        let d = q - x;
        if !d.is_zero() {
            ineqs.push(Constraint::new(d, zero.clone()));
        }
    }
    ineqs.extend(v.rays().iter().map(|r| Constraint::new(r.clone(), zero.clone())));
    let eqs = v.lineality().iter().map(|l| Constraint::new(l.clone(), zero.clone())).collect();
    let polar = dd_convert(&HPolyhedron::new(p.dim(), ineqs, eqs)?)?;
    Cone::from_vpolyhedron(&polar).ok_or_else(|| CalcError::Internal("polar cone has a nonzero vertex".into()))
}

/// Definitional test `⟨v, x − x̄⟩ ≤ 0 ∀x ∈ P` by a single LP.
pub fn oracle_normal_membership(v: &RatVector, p: &HPolyhedron, x: &RatVector) -> Result<bool> {
    check_dim(p.dim(), v.dim())?;
    check_dim(p.dim(), x.dim())?;
    if !p.contains(x)? {
        return Err(CalcError::PointOutsideSet);
    }
    if v.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    match lp_solve(v, p, Sense::Maximize)? {
        LpOutcome::Optimal { value, .. } => Ok(value == v.dot(x)),
        LpOutcome::Unbounded { .. } => Ok(false),
        LpOutcome::Infeasible { .. } => Err(CalcError::Internal("feasible set reported infeasible".into())),
    }
}
