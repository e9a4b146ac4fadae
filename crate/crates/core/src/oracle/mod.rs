//! Definitional LP oracles, the seeded instance generator and the fuzz harness.

mod fuzz;
mod generate;

pub use crate::calculus::{closed_form_subdiff, oracle_normal_membership, oracle_subgradient};
pub use fuzz::{
    box_probe, cross_check, fuzz, fuzz_until, qc_strictness, run_rule, verify_rule, verify_trial, Definition,
    FuzzFailure, FuzzReport, TrialOutcome, PROBE_SAMPLES,
};
pub use generate::{gen_instance, Gen, Instance, InstanceSpec, RuleKind};

/// A fresh RNG for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
