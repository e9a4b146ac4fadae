//! Exact polyhedral convex analysis.
//!
//! Normal cones, subdifferentials and coderivatives of polyhedrally represented
//! convex objects, computed in exact rational arithmetic, together with the
//! generalized-differentiation calculus rules evaluated as set identities.

pub mod error;
pub mod exact;
pub mod polyhedron;

pub use error::{CalcError, Result};
pub mod calculus;
pub mod separation;
pub mod setvalued;
pub mod gallery;
pub mod par;
pub mod oracle;
