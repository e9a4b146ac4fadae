use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::exact::{lp_solve, LpOutcome, Rat, RatVector, Sense};

use super::hrep::{Constraint, HPolyhedron};

/// `{Σλₖpₖ + Σμⱼrⱼ + Σνₗlₗ | λ ≥ 0, Σλ = 1, μ ≥ 0}`.
///
/// Empty exactly when there are no points; zero directions are dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VJson", into = "VJson")]
pub struct VPolyhedron {
    dim: usize,
    points: Vec<RatVector>,
    rays: Vec<RatVector>,
    lineality: Vec<RatVector>,
}

impl VPolyhedron {
    pub fn new(dim: usize, points: Vec<RatVector>, rays: Vec<RatVector>, lineality: Vec<RatVector>) -> Result<Self> {
        for v in points.iter().chain(&rays).chain(&lineality) {
            check_dim(dim, v.dim())?;
        }
        if points.is_empty() {
            return Ok(Self::empty(dim));
        }
        let mut out = VPolyhedron { dim, points: Vec::new(), rays: Vec::new(), lineality: Vec::new() };
        for p in points {
            if !out.points.contains(&p) {
                out.points.push(p);
            }
        }
        for r in rays {
            if r.is_zero() {
                continue;
            }
            let r = r.primitive();
            if !out.rays.contains(&r) {
                out.rays.push(r);
            }
        }
        for l in lineality {
            if l.is_zero() {
                continue;
            }
            let l = l.line_canonical();
            if !out.lineality.contains(&l) {
                out.lineality.push(l);
            }
        }
        Ok(out)
    }

    pub fn empty(dim: usize) -> Self {
        VPolyhedron { dim, points: Vec::new(), rays: Vec::new(), lineality: Vec::new() }
    }

    pub fn point(x: RatVector) -> Self {
        VPolyhedron { dim: x.dim(), points: vec![x], rays: Vec::new(), lineality: Vec::new() }
    }

    pub fn from_points(dim: usize, points: Vec<RatVector>) -> Result<Self> {
        Self::new(dim, points, Vec::new(), Vec::new())
    }

    /// All of ℚⁿ.
    pub fn universe(dim: usize) -> Self {
        VPolyhedron {
            dim,
            points: vec![RatVector::zeros(dim)],
            rays: Vec::new(),
            lineality: (0..dim).map(|i| RatVector::unit(dim, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[RatVector] {
        &self.points
    }

    pub fn rays(&self) -> &[RatVector] {
        &self.rays
    }

    pub fn lineality(&self) -> &[RatVector] {
        &self.lineality
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Whether the set is exactly `{0}`.
    pub fn is_origin(&self) -> bool {
        self.is_bounded() && self.points.len() == 1 && self.points[0].is_zero()
    }

    /// Membership by an LP over the generator multipliers.
    pub fn contains(&self, x: &RatVector) -> Result<bool> {
        check_dim(self.dim, x.dim())?;
        if self.is_empty() {
            return Ok(false);
        }
        let np = self.points.len();
        let nr = self.rays.len();
        let nl = self.lineality.len();
        let nvar = np + nr + nl;
        let mut ineqs = Vec::with_capacity(np + nr);
        for j in 0..np + nr {
            ineqs.push(Constraint::new(-RatVector::unit(nvar, j), Rat::zero()));
        }
        let mut eqs = Vec::with_capacity(self.dim + 1);
        for i in 0..self.dim {
            let row: Vec<Rat> =
                self.points.iter().chain(&self.rays).chain(&self.lineality).map(|g| g[i].clone()).collect();
            eqs.push(Constraint::new(RatVector::new(row), x[i].clone()));
        }
        let mut convex = RatVector::zeros(nvar);
        for j in 0..np {
            convex[j] = Rat::one();
        }
        eqs.push(Constraint::new(convex, Rat::one()));
        let system = HPolyhedron::new(nvar, ineqs, eqs)?;
        Ok(!matches!(lp_solve(&RatVector::zeros(nvar), &system, Sense::Minimize)?, LpOutcome::Infeasible { .. }))
    }

    /// `{−x | x ∈ self}`.
    pub fn negated(&self) -> VPolyhedron {
        VPolyhedron {
            dim: self.dim,
            points: self.points.iter().map(|p| -p).collect(),
            rays: self.rays.iter().map(|r| -r).collect(),
            lineality: self.lineality.clone(),
        }
    }

    pub fn translated(&self, shift: &RatVector) -> Result<VPolyhedron> {
        check_dim(self.dim, shift.dim())?;
        Ok(VPolyhedron {
            dim: self.dim,
            points: self.points.iter().map(|p| p + shift).collect(),
            rays: self.rays.clone(),
            lineality: self.lineality.clone(),
        })
    }

    /// Every generator direction with both signs of each lineality vector.
    pub fn directions(&self) -> impl Iterator<Item = RatVector> + '_ {
        self.rays.iter().cloned().chain(self.lineality.iter().flat_map(|l| [l.clone(), -l]))
    }

    /// A handful of members: the points, point-plus-direction pairs and the barycenter.
    pub fn sample_members(&self) -> Vec<RatVector> {
        let Some(p0) = self.points.first() else {
            return Vec::new();
        };
        let mut out = self.points.clone();
        for d in self.directions() {
            out.push(p0 + &d);
        }
        let count = Rat::from_integer(self.points.len().into());
        let mut bary = RatVector::zeros(self.dim);
        for p in &self.points {
            bary = &bary + p;
        }
        out.push(bary.scale(&(Rat::one() / count)));
        out
    }

    pub(crate) fn trusted(dim: usize, points: Vec<RatVector>, rays: Vec<RatVector>, lineality: Vec<RatVector>) -> Self {
        if points.is_empty() {
            return Self::empty(dim);
        }
        VPolyhedron { dim, points, rays, lineality }
    }
}

impl Default for VPolyhedron {
    fn default() -> Self {
        VPolyhedron::empty(0)
    }
}

#[derive(Serialize, Deserialize)]
struct VJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default)]
    points: Vec<RatVector>,
    #[serde(default)]
    rays: Vec<RatVector>,
    #[serde(default)]
    lineality: Vec<RatVector>,
}

impl TryFrom<VJson> for VPolyhedron {
    type Error = String;

    fn try_from(raw: VJson) -> std::result::Result<Self, String> {
        let dim = raw
            .dim
            .or_else(|| raw.points.iter().chain(&raw.rays).chain(&raw.lineality).map(RatVector::dim).next())
            .ok_or("dim: cannot infer the dimension of an empty generator list")?;
        for (name, list) in [("points", &raw.points), ("rays", &raw.rays), ("lineality", &raw.lineality)] {
            for (i, v) in list.iter().enumerate() {
                if v.dim() != dim {
                    return Err(format!("{name}[{i}]: expected {dim} entries, found {}", v.dim()));
                }
            }
        }
        VPolyhedron::new(dim, raw.points, raw.rays, raw.lineality).map_err(|e| e.to_string())
    }
}

impl From<VPolyhedron> for VJson {
    fn from(v: VPolyhedron) -> Self {
        VJson { dim: Some(v.dim), points: v.points, rays: v.rays, lineality: v.lineality }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::frac;

    #[test]
    fn membership_by_multipliers() {
        let tri = VPolyhedron::from_points(
            2,
            vec![RatVector::from_ints(&[0, 0]), RatVector::from_ints(&[1, 0]), RatVector::from_ints(&[0, 1])],
        )
        .unwrap();
        assert!(tri.contains(&RatVector::new(vec![frac(1, 3), frac(1, 3)])).unwrap());
        assert!(!tri.contains(&RatVector::new(vec![frac(2, 3), frac(2, 3)])).unwrap());
        let half = VPolyhedron::new(2, vec![RatVector::zeros(2)], vec![RatVector::from_ints(&[1, 0])], vec![
            RatVector::from_ints(&[0, 1]),
        ])
        .unwrap();
        assert!(half.contains(&RatVector::from_ints(&[5, -7])).unwrap());
        assert!(!half.contains(&RatVector::from_ints(&[-1, 0])).unwrap());
    }

    #[test]
    fn empty_when_no_points() {
        let v = VPolyhedron::new(2, vec![], vec![RatVector::from_ints(&[1, 0])], vec![]).unwrap();
        assert!(v.is_empty());
        assert!(v.rays().is_empty());
        let text = serde_json::to_string(&v).unwrap();
        let back: VPolyhedron = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
