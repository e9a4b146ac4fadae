use thiserror::Error;

/// Every failure the engine can report.
///
/// Variants map one-to-one onto the error conditions of the public
/// operations; none of them is used for internal control flow.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the set is empty")]
    EmptySet,
    #[error("dimension {dim} exceeds the double-description cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("{rows} inequality rows exceed the active-set enumeration cap {cap}")]
    EnumerationCapExceeded { rows: usize, cap: usize },
    #[error("{pieces} pieces exceed the piece cap {cap}")]
    PieceCapExceeded { pieces: usize, cap: usize },
    #[error("the point lies inside the set")]
    PointInsideSet,
    #[error("the point lies outside the set")]
    PointOutsideSet,
    #[error("the point lies outside the domain")]
    PointOutsideDomain,
    #[error("the base point lies outside the graph")]
    PointOutsideGraph,
    #[error("the point is not interior to every domain; continuity cannot be certified")]
    ContinuityHypothesisUnverifiable,
    #[error("the optimal value is not attained (unbounded below)")]
    ValueUnattained,
    #[error("monotonicity could not be certified: {0}")]
    MonotonicityUncertified(String),
    #[error("a subdifferential in the componentwise rule is unbounded")]
    UnboundedSubdifferential,
    #[error("invalid base point: {0}")]
    BasePointInvalid(String),
    #[error("no z with z in F(x,y) and -z in G(x,y)")]
    NoResidualPoint,
    #[error("coordinate index {index} out of range for dimension {dim}")]
    BadIndex { index: usize, dim: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CalcError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(CalcError::DimensionMismatch { expected, found })
    }
}
