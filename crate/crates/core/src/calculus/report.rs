use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::exact::RatVector;
use crate::polyhedron::ops::escape_witness;
use crate::polyhedron::{dd_convert, dd_convert_back, Cone, VPolyhedron};

/// Outcome of comparing the two sides of a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Equal,
    LhsStrictlySmaller,
    RhsStrictlySmaller,
    Incomparable,
}

/// Both sides of a calculus identity, evaluated at a concrete instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub rule: String,
    pub lhs: VPolyhedron,
    pub rhs: VPolyhedron,
    pub qualification_holds: bool,
    pub verdict: Verdict,
    /// A vector in exactly one of the two sides, when they differ.
    pub witness: Option<RatVector>,
    /// For rules whose right side is evaluated at several base points: whether every
    /// per-point set coincided.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_base_agree: Option<bool>,
}

impl RuleReport {
    /// Compares the sides and fills in the verdict and witness. Both sides are stored
    /// with irredundant generators.
    pub fn build(rule: &str, lhs: VPolyhedron, rhs: VPolyhedron, qualification_holds: bool) -> Result<Self> {
        check_dim(lhs.dim(), rhs.dim())?;
        let lhs_h = dd_convert_back(&lhs)?;
        let rhs_h = dd_convert_back(&rhs)?;
        let lhs = dd_convert(&lhs_h)?;
        let rhs = dd_convert(&rhs_h)?;
        let lhs_extra = escape_witness(&lhs, &rhs_h)?;
        let rhs_extra = escape_witness(&rhs, &lhs_h)?;
        let (verdict, witness) = match (lhs_extra, rhs_extra) {
            (None, None) => (Verdict::Equal, None),
            (None, Some(w)) => (Verdict::LhsStrictlySmaller, Some(w)),
            (Some(w), None) => (Verdict::RhsStrictlySmaller, Some(w)),
            (Some(w), Some(_)) => (Verdict::Incomparable, Some(w)),
        };
        Ok(RuleReport { rule: rule.to_string(), lhs, rhs, qualification_holds, verdict, witness, per_base_agree: None })
    }

    pub fn from_cones(rule: &str, lhs: &Cone, rhs: &Cone, qualification_holds: bool) -> Result<Self> {
        Self::build(rule, lhs.to_vpolyhedron(), rhs.to_vpolyhedron(), qualification_holds)
    }

    pub fn with_per_base(mut self, agree: bool) -> Self {
        self.per_base_agree = Some(agree);
        self
    }

    pub fn is_equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }

    /// `rhs ⊆ lhs`.
    pub fn rhs_included(&self) -> bool {
        matches!(self.verdict, Verdict::Equal | Verdict::RhsStrictlySmaller)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: i64, hi: i64) -> VPolyhedron {
        VPolyhedron::from_points(1, vec![RatVector::from_ints(&[lo]), RatVector::from_ints(&[hi])]).unwrap()
    }

    #[test]
    fn verdicts() {
        let r = RuleReport::build("t", interval(0, 1), interval(0, 1), true).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(r.witness.is_none());
        let r = RuleReport::build("t", interval(0, 1), interval(0, 2), true).unwrap();
        assert_eq!(r.verdict, Verdict::LhsStrictlySmaller);
        assert_eq!(r.witness, Some(RatVector::from_ints(&[2])));
        let r = RuleReport::build("t", interval(0, 2), interval(0, 1), true).unwrap();
        assert_eq!(r.verdict, Verdict::RhsStrictlySmaller);
        let r = RuleReport::build("t", interval(0, 1), interval(2, 3), true).unwrap();
        assert_eq!(r.verdict, Verdict::Incomparable);
    }

    #[test]
    fn empty_sides() {
        let r = RuleReport::build("t", VPolyhedron::empty(1), VPolyhedron::empty(1), true).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        let r = RuleReport::build("t", VPolyhedron::empty(1), interval(0, 0), true).unwrap();
        assert_eq!(r.verdict, Verdict::LhsStrictlySmaller);
    }
}
