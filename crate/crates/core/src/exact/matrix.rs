use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::Rat;
use super::vector::RatVector;
use crate::error::{check_dim, CalcError, Result};

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<RatVector>,
    ncols: usize,
}

impl RatMatrix {
    pub fn new(rows: Vec<RatVector>, ncols: usize) -> Result<Self> {
        for row in &rows {
            check_dim(ncols, row.dim())?;
        }
        Ok(RatMatrix { rows, ncols })
    }

    pub fn from_rows(rows: Vec<RatVector>) -> Result<Self> {
        let ncols = rows.first().map_or(0, RatVector::dim);
        Self::new(rows, ncols)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows: Vec<RatVector> = rows.iter().map(|r| RatVector::from_ints(r)).collect();
        Self::from_rows(rows).expect("ragged integer matrix")
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RatMatrix { rows: vec![RatVector::zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix { rows: (0..n).map(|i| RatVector::unit(n, i)).collect(), ncols: n }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &RatVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[RatVector] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> RatMatrix {
        let rows = (0..self.ncols)
            .map(|j| RatVector::new(self.rows.iter().map(|r| r[j].clone()).collect()))
            .collect();
        RatMatrix { rows, ncols: self.rows.len() }
    }

    pub fn mul_vec(&self, x: &RatVector) -> Result<RatVector> {
        check_dim(self.ncols, x.dim())?;
        Ok(RatVector::new(self.rows.iter().map(|r| r.dot(x)).collect()))
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        check_dim(self.ncols, other.nrows())?;
        let t = other.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| RatVector::new(t.rows.iter().map(|c| r.dot(c)).collect()))
            .collect();
        Ok(RatMatrix { rows, ncols: other.ncols })
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m: Vec<Vec<Rat>> = self.rows.iter().map(|r| r.entries().to_vec()).collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.ncols {
            if row == m.len() {
                break;
            }
            let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = Rat::one() / &m[row][col];
            for v in m[row].iter_mut() {
                *v *= &inv;
            }
            for i in 0..m.len() {
                if i != row && !m[i][col].is_zero() {
                    let factor = m[i][col].clone();
                    for j in col..self.ncols {
                        if !m[row][j].is_zero() {
                            let delta = &factor * &m[row][j];
                            m[i][j] -= delta;
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rows = m.into_iter().map(RatVector::new).collect();
        (RatMatrix { rows, ncols: self.ncols }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x | Mx = 0}`; empty when the kernel is trivial.
    pub fn nullspace(&self) -> Vec<RatVector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = RatVector::zeros(self.ncols);
                v[f] = Rat::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.rows[i][f].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `Mx = rhs`, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &RatVector) -> Result<Option<RatVector>> {
        check_dim(self.nrows(), rhs.dim())?;
        let augmented: Vec<RatVector> = self
            .rows
            .iter()
            .zip(rhs.iter())
            .map(|(r, b)| {
                let mut row = r.clone();
                row.push(b.clone());
                row
            })
            .collect();
        let aug = RatMatrix { rows: augmented, ncols: self.ncols + 1 };
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.ncols) {
            return Ok(None);
        }
        let mut x = RatVector::zeros(self.ncols);
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.rows[i][self.ncols].clone();
        }
        Ok(Some(x))
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<RatVector> = Vec::deserialize(d)?;
        RatMatrix::from_rows(rows).map_err(|e: CalcError| serde::de::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans_same_line(basis: &[RatVector], expected: &RatVector) -> bool {
        basis.len() == 1 && basis[0].line_canonical() == expected.line_canonical()
    }

    #[test]
    fn nullspace_examples() {
        let m = RatMatrix::from_ints(&[&[1, 0]]);
        assert!(spans_same_line(&m.nullspace(), &RatVector::from_ints(&[0, 1])));
        assert!(RatMatrix::identity(2).nullspace().is_empty());
        let m = RatMatrix::from_ints(&[&[1, 1], &[2, 2]]);
        assert!(spans_same_line(&m.nullspace(), &RatVector::from_ints(&[1, -1])));
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = RatMatrix::from_ints(&[&[1, 2, 3, 4], &[2, 4, 1, 0], &[3, 6, 4, 4]]);
        let basis = m.nullspace();
        assert_eq!(basis.len(), 4 - m.rank());
        for v in &basis {
            assert!(m.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = RatMatrix::from_ints(&[&[1, 1], &[2, 2]]);
        let x = m.solve(&RatVector::from_ints(&[1, 2])).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), RatVector::from_ints(&[1, 2]));
        assert!(m.solve(&RatVector::from_ints(&[1, 3])).unwrap().is_none());
    }
}
