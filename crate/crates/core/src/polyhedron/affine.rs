use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::exact::{RatMatrix, RatVector};

use super::hrep::{Constraint, HPolyhedron};

/// `x ↦ Ax + b` from ℚⁿ to ℚᵖ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AffineJson", into = "AffineJson")]
pub struct AffineMap {
    a: RatMatrix,
    b: RatVector,
    input_dim: usize,
}

impl AffineMap {
    pub fn new(a: RatMatrix, b: RatVector) -> Result<Self> {
        check_dim(a.nrows(), b.dim())?;
        let input_dim = a.ncols();
        Ok(AffineMap { a, b, input_dim })
    }

    /// A map with an explicit input dimension, needed when `A` has no rows.
    pub fn with_input_dim(a: RatMatrix, b: RatVector, input_dim: usize) -> Result<Self> {
        check_dim(a.nrows(), b.dim())?;
        if a.nrows() > 0 {
            check_dim(input_dim, a.ncols())?;
        }
        Ok(AffineMap { a, b, input_dim })
    }

    pub fn linear(a: RatMatrix) -> Self {
        let b = RatVector::zeros(a.nrows());
        let input_dim = a.ncols();
        AffineMap { a, b, input_dim }
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(RatMatrix::identity(n))
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.b.dim()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.a
    }

    pub fn offset(&self) -> &RatVector {
        &self.b
    }

    pub fn apply(&self, x: &RatVector) -> Result<RatVector> {
        check_dim(self.input_dim, x.dim())?;
        Ok(&self.a.mul_vec(x)? + &self.b)
    }

    pub fn apply_linear(&self, x: &RatVector) -> Result<RatVector> {
        check_dim(self.input_dim, x.dim())?;
        self.a.mul_vec(x)
    }

    /// The linear map `v ↦ Aᵀv`.
    pub fn adjoint(&self) -> AffineMap {
        AffineMap::with_input_dim(self.a.transpose(), RatVector::zeros(self.input_dim), self.output_dim())
            .expect("transpose dims are consistent")
    }

    /// `gph(B) = {(x, y) | y = Ax + b}` in ℚⁿ⁺ᵖ.
    pub fn graph(&self) -> HPolyhedron {
        let n = self.input_dim;
        let p = self.output_dim();
        let eqs = (0..p)
            .map(|i| {
                let mut normal = RatVector::zeros(n + p);
                for j in 0..n {
                    normal[j] = -self.a.entry(i, j).clone();
                }
                normal[n + i] = num_traits::One::one();
                Constraint::new(normal, self.b[i].clone())
            })
            .collect();
        HPolyhedron::new(n + p, Vec::new(), eqs).expect("dims consistent")
    }
}

#[derive(Serialize, Deserialize)]
struct AffineJson {
    #[serde(rename = "A")]
    a: Vec<RatVector>,
    b: RatVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

impl TryFrom<AffineJson> for AffineMap {
    type Error = String;

    fn try_from(raw: AffineJson) -> std::result::Result<Self, String> {
        let n = raw.n.or_else(|| raw.a.first().map(RatVector::dim)).ok_or("A: empty matrix needs an explicit \"n\"")?;
        for (i, row) in raw.a.iter().enumerate() {
            if row.dim() != n {
                return Err(format!("A[{i}]: expected {n} entries, found {}", row.dim()));
            }
        }
        if raw.a.len() != raw.b.dim() {
            return Err(format!("b: expected {} entries, found {}", raw.a.len(), raw.b.dim()));
        }
        let a = RatMatrix::new(raw.a, n).map_err(|e| e.to_string())?;
        AffineMap::with_input_dim(a, raw.b, n).map_err(|e| e.to_string())
    }
}

impl From<AffineMap> for AffineJson {
    fn from(m: AffineMap) -> Self {
        AffineJson { a: m.a.rows().to_vec(), b: m.b, n: Some(m.input_dim) }
    }
}
