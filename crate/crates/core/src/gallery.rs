//! Two fixed nonpolyhedral instances with closed-form answers: the subdifferential
//! of the Euclidean norm and a pair of parabolic regions on which the intersection
//! rule fails.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::calculus::RuleReport;
use crate::error::Result;
use crate::exact::rat::frac;
use crate::exact::{Rat, RatVector};
use crate::polyhedron::{Cone, VPolyhedron};

/// Membership in `∂‖·‖(x̄)`: the closed unit ball at the origin, `{x̄/‖x̄‖}` elsewhere.
///
/// Away from the origin the test `v = x̄/‖x̄‖` is decided without square roots:
/// `⟨v, x̄⟩ > 0`, `⟨v, x̄⟩² = ⟨v, v⟩⟨x̄, x̄⟩` (parallel, same orientation) and `⟨v, v⟩ = 1`.
pub fn ball_subdiff_member(v: &RatVector, x: &RatVector) -> bool {
    if v.dim() != x.dim() {
        return false;
    }
    let vv = v.norm_squared();
    if x.is_zero() {
        return vv <= Rat::one();
    }
    let vx = v.dot(x);
    let xx = x.norm_squared();
    vx.is_positive() && &vx * &vx == &vv * &xx && vv.is_one()
}

/// Parabolic regions `Ω₁ = {λ ≥ x²}` and `Ω₂ = {λ ≤ −x²}` in the `(x, λ)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parabola {
    Upper,
    Lower,
    Meet,
}

impl Parabola {
    /// The closed-form normal cone at the origin.
    pub fn normal_cone(self) -> Cone {
        match self {
            Parabola::Upper => Cone::new(2, vec![RatVector::from_ints(&[0, -1])], vec![]).expect("fixed data"),
            Parabola::Lower => Cone::new(2, vec![RatVector::from_ints(&[0, 1])], vec![]).expect("fixed data"),
            Parabola::Meet => Cone::whole_space(2),
        }
    }

    /// Boundary points over the grid, which lie in the region.
    fn boundary(self, x: &Rat) -> Vec<RatVector> {
        let sq = x * x;
        match self {
            Parabola::Upper => vec![RatVector::new(vec![x.clone(), sq])],
            Parabola::Lower => vec![RatVector::new(vec![x.clone(), -sq])],
            Parabola::Meet => vec![RatVector::zeros(2)],
        }
    }
}

/// The probe abscissae `−3, −5/2, …, 3`.
pub fn probe_grid() -> Vec<Rat> {
    (-6..=6).map(|k| frac(k, 2)).collect()
}

/// First grid abscissa where `⟨v, ω⟩ > 0` for a region point `ω`, if any.
///
/// A necessary condition for `v ∈ N((0,0); Ω)`; used to guard the closed forms.
pub fn grid_probe(v: &RatVector, region: Parabola) -> Option<Rat> {
    probe_grid().into_iter().find(|x| region.boundary(x).iter().any(|w| v.dot(w).is_positive()))
}

/// Whether every generator and both signs of every lineality vector of a closed-form cone pass the grid probe.
pub fn closed_form_passes_probes(region: Parabola) -> bool {
    let cone = region.normal_cone();
    let probes = cone.generators().iter().cloned().chain(cone.lineality().iter().flat_map(|l| [l.clone(), -l]));
    probes.into_iter().all(|v| grid_probe(&v, region).is_none())
}

/// The failed intersection rule on the parabolic pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolaReport {
    pub report: RuleReport,
    pub upper: Cone,
    pub lower: Cone,
    pub meet: Cone,
    pub probes_pass: bool,
}

/// `N((0,0); Ω₁ ∩ Ω₂) = ℝ²` against `N((0,0); Ω₁) + N((0,0); Ω₂) = {0} × ℝ`; the
/// relative interiors are disjoint, so the qualification fails.
pub fn parabola_counterexample() -> Result<ParabolaReport> {
    let upper = Parabola::Upper.normal_cone();
    let lower = Parabola::Lower.normal_cone();
    let meet = Parabola::Meet.normal_cone();
    let rhs = upper.sum(&lower)?;
    let report = RuleReport::from_cones("intersection", &meet, &rhs, false)?;
    let probes_pass = [Parabola::Upper, Parabola::Lower, Parabola::Meet].into_iter().all(closed_form_passes_probes);
    Ok(ParabolaReport { report, upper, lower, meet, probes_pass })
}

/// `∂‖·‖(0)` restricted to `ℝ¹`: the interval `[−1, 1]`.
pub fn ball_subdiff_1d() -> VPolyhedron {
    VPolyhedron::from_points(1, vec![RatVector::from_ints(&[-1]), RatVector::from_ints(&[1])]).expect("fixed data")
}
