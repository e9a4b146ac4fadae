//! Normal cones, subdifferentials of max-affine functions and the rules relating them.

mod function;
mod normal;
mod report;
mod rules;
mod subdiff;

pub use function::{MaxAffineFunction, Piece, PIECE_CAP};
pub use normal::{normal_cone, normal_cone_polar, oracle_normal_membership};
pub use report::{RuleReport, Verdict};
pub use rules::{active_functions, chain_rule_affine, intersection_rule, max_rule, range_meets_ri, sum_rule};
pub use subdiff::{
    closed_form_subdiff, fermat_check, minimize, oracle_subgradient, subdiff_nonempty_on_ri, subdifferential,
};
pub(crate) use subdiff::slice_epigraph_normals;
