//! Euclidean projection onto polyhedra, strict and proper separation, and the
//! basic qualification condition.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::calculus::normal_cone;
use crate::error::{check_dim, CalcError, Result};
use crate::exact::{lp_solve, LpOutcome, Rat, RatMatrix, RatVector, Sense};
use crate::polyhedron::{
    dd_convert, dd_convert_back, implicit_equalities, minkowski_diff, ri_contains, HPolyhedron, PolyhedralSet,
};

/// Largest inequality count accepted by the active-set enumeration.
pub const PROJECTION_ROW_CAP: usize = 20;

/// The nearest point of a polyhedron with its squared distance and active rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub point: RatVector,
    #[serde(with = "crate::exact::rat")]
    pub squared_distance: Rat,
    pub active_rows: Vec<usize>,
}

/// `max ⟨x̄ − ω̄, ω − ω̄⟩` over `P`; `None` when unbounded.
pub fn variational_gap(x: &RatVector, p: &HPolyhedron, candidate: &RatVector) -> Result<Option<Rat>> {
    let dir = x - candidate;
    match lp_solve(&dir, p, Sense::Maximize)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value - dir.dot(candidate))),
        LpOutcome::Unbounded { .. } => Ok(None),
        LpOutcome::Infeasible { .. } => Err(CalcError::EmptySet),
    }
}

/// Projection of `x̄` onto the affine set `{Mω = r}`: `ω = x̄ − Mᵀλ` with `MMᵀλ = Mx̄ − r`.
fn project_affine(x: &RatVector, rows: &[&crate::polyhedron::Constraint]) -> Result<Option<RatVector>> {
    if rows.is_empty() {
        return Ok(Some(x.clone()));
    }
    let m = RatMatrix::new(rows.iter().map(|c| c.normal.clone()).collect(), x.dim())?;
    let gram = m.mul(&m.transpose())?;
    let rhs = RatVector::new(rows.iter().map(|c| c.normal.dot(x) - &c.rhs).collect());
    let Some(lambda) = gram.solve(&rhs)? else {
        return Ok(None);
    };
    let correction = m.transpose().mul_vec(&lambda)?;
    Ok(Some(x - &correction))
}

/// The Euclidean projection `π(x̄; P)` by active-set enumeration.
///
/// Subsets of inequality rows are tried in order of size; the first candidate that lies
/// in `P` and satisfies the variational inequality (an LP with optimal value 0) is the
/// projection.
pub fn euclid_project(x: &RatVector, p: &HPolyhedron) -> Result<ProjectionResult> {
    check_dim(p.dim(), x.dim())?;
    if !p.is_feasible() {
        return Err(CalcError::EmptySet);
    }
    let m = p.ineqs().len();
    if m > PROJECTION_ROW_CAP {
        return Err(CalcError::EnumerationCapExceeded { rows: m, cap: PROJECTION_ROW_CAP });
    }
    let finish = |point: RatVector| {
        let squared_distance = (x - &point).norm_squared();
        let active_rows = p.active_rows(&point);
        ProjectionResult { point, squared_distance, active_rows }
    };
    if p.contains(x)? {
        return Ok(finish(x.clone()));
    }
    for size in 0..=m.min(p.dim()) {
        for subset in Subsets::new(m, size) {
            let rows: Vec<_> = p.eqs().iter().chain(subset.iter().map(|&i| &p.ineqs()[i])).collect();
            let Some(candidate) = project_affine(x, &rows)? else {
                continue;
            };
            if !p.contains(&candidate)? {
                continue;
            }
            if variational_gap(x, p, &candidate)?.is_some_and(|g| g.is_zero()) {
                return Ok(finish(candidate));
            }
        }
    }
    Err(CalcError::Internal("no active set produced the projection".into()))
}

/// Lexicographic `k`-subsets of `0..n`.
struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets { n, current: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// A separating direction with the extreme values of `⟨v, ·⟩` on both sets.
///
/// `None` in a `sup_*` field stands for `+∞`, in an `inf_*` field for `−∞`. The
/// certificate asserts `sup_left ≤ inf_right` and `inf_left < sup_right`; for strict
/// separation of a point the right set is that point and `sup_left < inf_right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub v: RatVector,
    #[serde(with = "crate::exact::rat::opt")]
    pub sup_left: Option<Rat>,
    #[serde(with = "crate::exact::rat::opt")]
    pub inf_left: Option<Rat>,
    #[serde(with = "crate::exact::rat::opt")]
    pub sup_right: Option<Rat>,
    #[serde(with = "crate::exact::rat::opt")]
    pub inf_right: Option<Rat>,
}

impl SeparationCertificate {
    /// `sup_left ≤ inf_right` and `inf_left < sup_right`.
    pub fn is_proper(&self) -> bool {
        let weak = match (&self.sup_left, &self.inf_right) {
            (Some(s), Some(i)) => s <= i,
            _ => false,
        };
        let strict_somewhere = match (&self.inf_left, &self.sup_right) {
            (Some(i), Some(s)) => i < s,
            _ => true,
        };
        weak && strict_somewhere
    }

    pub fn is_strict(&self) -> bool {
        matches!((&self.sup_left, &self.inf_right), (Some(s), Some(i)) if s < i)
    }
}

/// Outcome of a proper-separation query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SeparationOutcome {
    Separated { certificate: SeparationCertificate },
    NotSeparable,
}

impl SeparationOutcome {
    pub fn is_separated(&self) -> bool {
        matches!(self, SeparationOutcome::Separated { .. })
    }
}

fn extreme(v: &RatVector, p: &HPolyhedron, sense: Sense) -> Result<Option<Rat>> {
    match lp_solve(v, p, sense)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Unbounded { .. } => Ok(None),
        LpOutcome::Infeasible { .. } => Err(CalcError::EmptySet),
    }
}

/// Evaluates `⟨v, ·⟩` on both sets by LP.
pub fn certify(v: &RatVector, left: &HPolyhedron, right: &HPolyhedron) -> Result<SeparationCertificate> {
    Ok(SeparationCertificate {
        v: v.clone(),
        sup_left: extreme(v, left, Sense::Maximize)?,
        inf_left: extreme(v, left, Sense::Minimize)?,
        sup_right: extreme(v, right, Sense::Maximize)?,
        inf_right: extreme(v, right, Sense::Minimize)?,
    })
}

/// `v = x̄ − π(x̄; P)` with `sup_P ⟨v, ·⟩ < ⟨v, x̄⟩`.
pub fn strictly_separate(x: &RatVector, p: &HPolyhedron) -> Result<SeparationCertificate> {
    check_dim(p.dim(), x.dim())?;
    if p.contains(x)? {
        return Err(CalcError::PointInsideSet);
    }
    let proj = euclid_project(x, p)?;
    let v = x - &proj.point;
    let cert = certify(&v, p, &HPolyhedron::singleton(x))?;
    if !cert.is_strict() {
        return Err(CalcError::Internal("strict separation certificate failed to verify".into()));
    }
    Ok(cert)
}

/// Decides proper separation through `0 ∉ ri(P₁ − P₂)` and builds a certificate.
pub fn properly_separate(p1: &HPolyhedron, p2: &HPolyhedron) -> Result<SeparationOutcome> {
    check_dim(p1.dim(), p2.dim())?;
    let diff = minkowski_diff(&dd_convert(p1)?, &dd_convert(p2)?)?;
    if diff.is_empty() {
        return Err(CalcError::EmptySet);
    }
    let omega = diff.to_h()?;
    let origin = RatVector::zeros(p1.dim());
    if ri_contains(&omega, &origin)? {
        return Ok(SeparationOutcome::NotSeparable);
    }
    let v = if !omega.contains(&origin)? {
        // sup over P₁ − P₂ below 0 means sup P₁ < inf P₂ along this direction.
        strictly_separate(&origin, &omega)?.v
    } else {
        let implicit = implicit_equalities(&omega)?;
        let row = omega
            .ineqs()
            .iter()
            .enumerate()
            .find(|(i, c)| !implicit.contains(i) && c.rhs.is_zero() && !c.normal.is_zero())
            .map(|(_, c)| c.normal.clone())
            .ok_or_else(|| CalcError::Internal("boundary point of the difference set has no active facet".into()))?;
        row
    };
    let cert = certify(&v, p1, p2)?;
    if !cert.is_proper() {
        return Err(CalcError::Internal("proper separation certificate failed to verify".into()));
    }
    Ok(SeparationOutcome::Separated { certificate: cert })
}

/// `N(x̄; P₁) ∩ [−N(x̄; P₂)] = {0}`.
pub fn check_basic_qc(p1: &HPolyhedron, p2: &HPolyhedron, x: &RatVector) -> Result<bool> {
    let n1 = normal_cone(p1, x)?;
    let n2 = normal_cone(p2, x)?.negated();
    let meet = dd_convert_back(&n1.to_vpolyhedron())?.intersect(&dd_convert_back(&n2.to_vpolyhedron())?)?;
    Ok(dd_convert(&meet)?.is_origin())
}
