use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::exact::RatVector;

use super::vrep::VPolyhedron;

/// A finitely generated cone `{Σλₖgₖ + Σνₗlₗ | λ ≥ 0}` with apex at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    dim: usize,
    generators: Vec<RatVector>,
    lineality: Vec<RatVector>,
}

impl Cone {
    pub fn new(dim: usize, generators: Vec<RatVector>, lineality: Vec<RatVector>) -> Result<Self> {
        for v in generators.iter().chain(&lineality) {
            check_dim(dim, v.dim())?;
        }
        let mut out = Cone { dim, generators: Vec::new(), lineality: Vec::new() };
        for g in generators {
            if g.is_zero() {
                continue;
            }
            let g = g.primitive();
            if !out.generators.contains(&g) {
                out.generators.push(g);
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

    /// The trivial cone `{0}`.
    pub fn origin(dim: usize) -> Self {
        Cone { dim, generators: Vec::new(), lineality: Vec::new() }
    }

    pub fn whole_space(dim: usize) -> Self {
        Cone { dim, generators: Vec::new(), lineality: (0..dim).map(|i| RatVector::unit(dim, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RatVector] {
        &self.generators
    }

    pub fn lineality(&self) -> &[RatVector] {
        &self.lineality
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    pub fn to_vpolyhedron(&self) -> VPolyhedron {
        VPolyhedron::trusted(self.dim, vec![RatVector::zeros(self.dim)], self.generators.clone(), self.lineality.clone())
    }

    /// Reads the directions of a V-polyhedron whose only point is the origin.
    pub fn from_vpolyhedron(v: &VPolyhedron) -> Option<Cone> {
        if v.points().len() != 1 || !v.points()[0].is_zero() {
            return None;
        }
        Cone::new(v.dim(), v.rays().to_vec(), v.lineality().to_vec()).ok()
    }

    /// Conic sum: generator and lineality lists concatenated.
    pub fn sum(&self, other: &Cone) -> Result<Cone> {
        check_dim(self.dim, other.dim)?;
        Cone::new(
            self.dim,
            self.generators.iter().chain(&other.generators).cloned().collect(),
            self.lineality.iter().chain(&other.lineality).cloned().collect(),
        )
    }

    pub fn negated(&self) -> Cone {
        Cone { dim: self.dim, generators: self.generators.iter().map(|g| -g).collect(), lineality: self.lineality.clone() }
    }

    pub fn contains(&self, v: &RatVector) -> Result<bool> {
        self.to_vpolyhedron().contains(v)
    }
}
