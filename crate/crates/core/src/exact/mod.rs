//! Exact rational scalars, vectors, matrices and the simplex solver.

pub mod lp;
pub mod matrix;
pub mod rat;
pub mod vector;

pub use lp::{lp_solve, lp_solve_with_stats, LpOutcome, LpStats, Sense};
pub use matrix::RatMatrix;
pub use rat::Rat;
pub use vector::{inner, RatVector};
