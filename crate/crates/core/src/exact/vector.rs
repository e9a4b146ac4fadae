use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{self, Rat, RatJson};
use crate::error::{check_dim, Result};

/// A point or direction in ℚⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RatVector(Vec<Rat>);

/// Exact inner product `Σ xᵢyᵢ`.
pub fn inner(x: &RatVector, y: &RatVector) -> Result<Rat> {
    check_dim(x.dim(), y.dim())?;
    Ok(x.dot(y))
}

impl RatVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVector(entries)
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVector(entries.iter().map(|&v| rat::int(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        RatVector(vec![Rat::zero(); dim])
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = Rat::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rat> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    /// Unchecked inner product; callers guarantee equal dimensions.
    pub fn dot(&self, other: &RatVector) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = Rat::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> Rat {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, factor: &Rat) -> RatVector {
        RatVector(self.0.iter().map(|v| v * factor).collect())
    }

    /// `self + factor·other`.
    pub fn add_scaled(&self, factor: &Rat, other: &RatVector) -> RatVector {
        debug_assert_eq!(self.dim(), other.dim());
        if factor.is_zero() {
            return self.clone();
        }
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + factor * b).collect())
    }

    pub fn concat(&self, other: &RatVector) -> RatVector {
        let mut entries = self.0.clone();
        entries.extend(other.0.iter().cloned());
        RatVector(entries)
    }

    /// Entries at the given positions, in order.
    pub fn select(&self, positions: &[usize]) -> RatVector {
        RatVector(positions.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub fn slice(&self, start: usize, end: usize) -> RatVector {
        RatVector(self.0[start..end].to_vec())
    }

    /// Positive multiple with coprime integer entries (the zero vector is returned as is).
    pub fn primitive(&self) -> RatVector {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for v in &self.0 {
            lcm = lcm.lcm(v.denom());
        }
        let ints: Vec<BigInt> = self.0.iter().map(|v| (v * Rat::from_integer(lcm.clone())).to_integer()).collect();
        let mut gcd = BigInt::zero();
        for v in &ints {
            gcd = gcd.gcd(v);
        }
        RatVector(ints.into_iter().map(|v| Rat::from_integer(v / &gcd)).collect())
    }

    /// Index of the first nonzero entry.
    pub fn leading_index(&self) -> Option<usize> {
        self.0.iter().position(|v| !v.is_zero())
    }

    /// Canonical representative of the line spanned by `self`: primitive with a positive leading entry.
    pub fn line_canonical(&self) -> RatVector {
        let p = self.primitive();
        match p.leading_index() {
            Some(i) if p.0[i].is_negative() => -p,
            _ => p,
        }
    }

    pub fn push(&mut self, value: Rat) {
        self.0.push(value);
    }
}

impl From<Vec<Rat>> for RatVector {
    fn from(v: Vec<Rat>) -> Self {
        RatVector(v)
    }
}

impl Index<usize> for RatVector {
    type Output = Rat;

    fn index(&self, index: usize) -> &Rat {
        &self.0[index]
    }
}

impl IndexMut<usize> for RatVector {
    fn index_mut(&mut self, index: usize) -> &mut Rat {
        &mut self.0[index]
    }
}

impl Add for &RatVector {
    type Output = RatVector;

    fn add(self, other: &RatVector) -> RatVector {
        debug_assert_eq!(self.dim(), other.dim());
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RatVector {
    type Output = RatVector;

    fn sub(self, other: &RatVector) -> RatVector {
        debug_assert_eq!(self.dim(), other.dim());
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RatVector {
    type Output = RatVector;

    fn neg(self) -> RatVector {
        RatVector(self.0.iter().map(|v| -v).collect())
    }
}

impl Neg for RatVector {
    type Output = RatVector;

    fn neg(self) -> RatVector {
        RatVector(self.0.into_iter().map(|v| -v).collect())
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&rat::format(v))?;
        }
        f.write_str(")")
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in &self.0 {
            seq.serialize_element(&RatJson(v.clone()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<RatJson> = Vec::deserialize(d)?;
        Ok(RatVector(raw.into_iter().map(|r| r.0).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{frac, int};

    #[test]
    fn inner_examples() {
        let a = RatVector::from_ints(&[1, 2]);
        let b = RatVector::from_ints(&[3, 4]);
        assert_eq!(inner(&a, &b).unwrap(), int(11));
        assert_eq!(inner(&a, &RatVector::zeros(2)).unwrap(), int(0));
        let c = RatVector::new(vec![frac(1, 2), frac(1, 3)]);
        let d = RatVector::from_ints(&[2, 3]);
        assert_eq!(inner(&c, &d).unwrap(), int(2));
        assert!(inner(&a, &RatVector::zeros(3)).is_err());
    }

    #[test]
    fn primitive_scaling() {
        let v = RatVector::new(vec![frac(-2, 3), frac(4, 9)]);
        assert_eq!(v.primitive(), RatVector::from_ints(&[-3, 2]));
        assert_eq!(v.line_canonical(), RatVector::from_ints(&[3, -2]));
    }

    #[test]
    fn json_round_trip() {
        let v = RatVector::new(vec![frac(1, 2), int(-3)]);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, "[\"1/2\",-3]");
        let back: RatVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
