//! Polyhedral set-valued maps, their coderivatives and the rules that relate them.

mod map;
mod rules;

pub use map::PolyhedralMap;
pub use rules::{
    coderivative, coderivative_chain, coderivative_intersect, coderivative_sum, componentwise_chain,
    compose_componentwise, domain_normal, optimal_value, optimal_value_epigraph, optimal_value_subdiff,
    preimage_normal, solution_map_coderivative,
};
