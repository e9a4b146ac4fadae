use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    chain_rule_affine, intersection_rule, max_rule, oracle_normal_membership, oracle_subgradient, sum_rule,
    MaxAffineFunction, RuleReport, Verdict,
};
use crate::error::{CalcError, Result};
use crate::exact::{Rat, RatVector};
use crate::par::{map_indices, ExecMode};
use crate::polyhedron::{intersect, HPolyhedron, VPolyhedron};
use crate::setvalued::{
    coderivative_chain, coderivative_intersect, coderivative_sum, compose_componentwise, componentwise_chain,
    domain_normal, optimal_value, optimal_value_epigraph, optimal_value_subdiff, preimage_normal,
    solution_map_coderivative, PolyhedralMap,
};

use super::generate::{gen_instance, Instance, InstanceSpec, RuleKind};

/// Number of random box points checked against the emitted left side.
pub const PROBE_SAMPLES: usize = 20;

/// The definition a candidate member of a rule's left side must satisfy.
#[derive(Clone, Debug)]
pub enum Definition {
    /// `(u, tail) ∈ N(point; set)`.
    Normal { set: HPolyhedron, point: RatVector, tail: RatVector },
    /// `u ∈ ∂f(x)`.
    Subgradient { f: MaxAffineFunction, x: RatVector },
}

impl Definition {
    pub fn accepts(&self, u: &RatVector) -> Result<bool> {
        match self {
            Definition::Normal { set, point, tail } => oracle_normal_membership(&u.concat(tail), set, point),
            Definition::Subgradient { f, x } => oracle_subgradient(u, f, x),
        }
    }
}

fn normal_at(set: HPolyhedron, point: RatVector) -> Definition {
    Definition::Normal { set, point, tail: RatVector::zeros(0) }
}

fn graph_normal(map: &PolyhedralMap, x: &RatVector, y: &RatVector, v: &RatVector) -> Definition {
    Definition::Normal { set: map.graph().clone(), point: x.concat(y), tail: -v }
}

/// Runs the rule named by the instance and returns its report with the definition of the left side.
pub fn run_rule(instance: &Instance) -> Result<(RuleReport, Definition)> {
    Ok(match instance {
        Instance::Intersection { sets, x } => {
            (intersection_rule(sets, x)?, normal_at(intersect(sets)?, x.clone()))
        }
        Instance::Sum { fns, x } => {
            (sum_rule(fns, x)?, Definition::Subgradient { f: MaxAffineFunction::sum(fns)?, x: x.clone() })
        }
        Instance::Chain { f, map, x } => {
            (chain_rule_affine(f, map, x)?, Definition::Subgradient { f: f.compose_affine(map)?, x: x.clone() })
        }
        Instance::Max { fns, x } => {
            (max_rule(fns, x)?, Definition::Subgradient { f: MaxAffineFunction::max_of(fns)?, x: x.clone() })
        }
        Instance::OptimalValue { phi, map, x } => {
            let report = optimal_value_subdiff(phi, map, x)?;
            let (_, mu) = optimal_value(phi, map, x)?;
            let mut point = x.clone();
            point.push(mu);
            let tail = RatVector::new(vec![-Rat::from_integer(1.into())]);
            (report, Definition::Normal { set: optimal_value_epigraph(phi, map)?, point, tail })
        }
        Instance::Componentwise { g, fns, x } => (
            componentwise_chain(g, fns, x)?,
            Definition::Subgradient { f: compose_componentwise(g, fns)?, x: x.clone() },
        ),
        Instance::Preimage { map, theta, x, y } => {
            (preimage_normal(map, theta, x, y)?, normal_at(map.preimage_of(theta)?, x.clone()))
        }
        Instance::CodSum { f1, f2, x, y, v } => {
            (coderivative_sum(f1, f2, x, y, v)?, graph_normal(&f1.sum(f2)?, x, y, v))
        }
        Instance::CodChain { f, g, x, z, w } => {
            (coderivative_chain(f, g, x, z, w)?, graph_normal(&f.then(g)?, x, z, w))
        }
        Instance::CodIntersect { f1, f2, x, y, v } => {
            (coderivative_intersect(f1, f2, x, y, v)?, graph_normal(&f1.intersect(f2)?, x, y, v))
        }
        Instance::Domain { map, x } => (domain_normal(map, x)?, normal_at(map.domain()?, x.clone())),
        Instance::SolutionMap { f, g, x, y, v } => {
            let s = PolyhedralMap::solution_map(f, g, x.dim())?;
            (solution_map_coderivative(f, g, x, y, v)?, graph_normal(&s, x, y, v))
        }
    })
}

/// Points with coordinates on a half-integer grid inside the bounding box of the sample
/// members of `set`, widened by one.
pub fn box_probe(set: &VPolyhedron, samples: usize, rng: &mut ChaCha8Rng) -> Vec<RatVector> {
    let members = set.sample_members();
    let Some(first) = members.first() else {
        return Vec::new();
    };
    let dim = set.dim();
    let mut lo = first.clone();
    let mut hi = first.clone();
    for m in &members {
        for i in 0..dim {
            if m[i] < lo[i] {
                lo[i] = m[i].clone();
            }
            if m[i] > hi[i] {
                hi[i] = m[i].clone();
            }
        }
    }
    let to_half = |r: &Rat, up: bool| -> i64 {
        let doubled = r * Rat::from_integer(2.into());
        let v = if up { doubled.ceil() } else { doubled.floor() };
        v.to_integer().try_into().unwrap_or(0)
    };
    (0..samples)
        .map(|_| {
            RatVector::new(
                (0..dim)
                    .map(|i| {
                        let a = to_half(&lo[i], false) - 2;
                        let b = to_half(&hi[i], true) + 2;
                        Rat::new(rng.gen_range(a..=b).into(), 2.into())
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Checks every sample member of the left side against the definition, and that every
/// probe point the definition accepts is a member. Returns a description of the first
/// disagreement.
pub fn cross_check(report: &RuleReport, def: &Definition, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    for u in report.lhs.sample_members() {
        if !def.accepts(&u)? {
            return Ok(Some(format!("emitted member {u} rejected by the definition")));
        }
    }
    for u in box_probe(&report.lhs, PROBE_SAMPLES, rng) {
        if def.accepts(&u)? && !report.lhs.contains(&u)? {
            return Ok(Some(format!("definition accepts {u}, which the left side misses")));
        }
    }
    Ok(None)
}

/// Result of one fuzz trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialOutcome {
    Checked { qualified: bool, equal: bool, verdict: Verdict, witness: Option<RatVector>, problem: Option<String> },
    Skipped { reason: String },
}

/// Draws and verifies one instance; the trial stream is derived from `(spec.seed, trial)`.
pub fn verify_trial(kind: RuleKind, spec: &InstanceSpec, trial: u64) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial);
    let instance = gen_instance(&mut rng, spec, kind);
    match verify_rule(&instance, &mut rng) {
        Ok(outcome) => outcome,
        Err(e) => TrialOutcome::Skipped { reason: e.to_string() },
    }
}

/// Runs the rule of `instance` and cross-checks the left side with its definition.
///
/// Vacuous instances (base point outside a domain, unattained values and the like)
/// surface as errors and are recorded as skipped by the harness.
pub fn verify_rule(instance: &Instance, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let (report, def) = run_rule(instance)?;
    let problem = cross_check(&report, &def, rng)?;
    let mut equal = report.is_equal();
    if instance.kind() == RuleKind::Domain && report.per_base_agree == Some(false) {
        equal = false;
    }
    Ok(TrialOutcome::Checked {
        qualified: report.qualification_holds,
        equal,
        verdict: report.verdict,
        witness: report.witness,
        problem,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzFailure {
    pub trial: u64,
    pub verdict: Verdict,
    pub witness: Option<RatVector>,
    pub reason: String,
}

/// Aggregate of a fuzz run. Identical inputs give identical reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub rule: RuleKind,
    pub seed: u64,
    pub qualified_mode: bool,
    pub trials: u64,
    pub qualified_trials: u64,
    pub equal_count: u64,
    /// Trials without the qualification whose two sides still coincided.
    pub unqualified_equal: u64,
    pub skipped: u64,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    /// No failures and, in qualified mode, every qualified trial equal.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && (!self.qualified_mode || self.equal_count == self.qualified_trials)
    }
}

/// Runs `trials` independent trials of a rule.
pub fn fuzz(kind: RuleKind, spec: &InstanceSpec, trials: u64, mode: ExecMode) -> FuzzReport {
    let outcomes = map_indices(trials, mode, |t| verify_trial(kind, spec, t));
    let mut report = FuzzReport {
        rule: kind,
        seed: spec.seed,
        qualified_mode: spec.qualified,
        trials,
        qualified_trials: 0,
        equal_count: 0,
        unqualified_equal: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let trial = trial as u64;
        match outcome {
            TrialOutcome::Skipped { .. } => report.skipped += 1,
            TrialOutcome::Checked { qualified, equal, verdict, witness, problem } => {
                if qualified {
                    report.qualified_trials += 1;
                    if equal && problem.is_none() {
                        report.equal_count += 1;
                    }
                } else if equal && problem.is_none() {
                    report.unqualified_equal += 1;
                }
                let reason = match (problem, qualified && !equal) {
                    (Some(p), _) => Some(p),
                    (None, true) => Some("qualified trial did not return Equal".to_string()),
                    (None, false) => None,
                };
                if let Some(reason) = reason {
                    report.failures.push(FuzzFailure { trial, verdict, witness, reason });
                }
            }
        }
    }
    report
}

/// Runs trials until `target` qualified ones have been checked or `max_trials` is reached.
pub fn fuzz_until(kind: RuleKind, spec: &InstanceSpec, target: u64, max_trials: u64, mode: ExecMode) -> FuzzReport {
    let mut trials = target;
    loop {
        let report = fuzz(kind, spec, trials, mode);
        if report.qualified_trials >= target || trials >= max_trials {
            return report;
        }
        trials = (trials * 2).min(max_trials);
    }
}

/// Counts two-set intersection instances where the basic qualification holds but the
/// relative-interior one fails. Both generator modes are used.
pub fn qc_strictness(seed: u64, trials: u64, mode: ExecMode) -> Result<u64> {
    let counts = map_indices(trials, mode, |t| -> Result<u64> {
        let spec = InstanceSpec { seed, qualified: t % 2 == 0, ..InstanceSpec::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let Instance::Intersection { sets, x } = gen_instance(&mut rng, &spec, RuleKind::Intersection) else {
            return Err(CalcError::Internal("generator returned the wrong kind".into()));
        };
        let (p1, p2) = (&sets[0], &sets[1]);
        if !p1.contains(&x)? || !p2.contains(&x)? {
            return Ok(0);
        }
        let basic = crate::separation::check_basic_qc(p1, p2, &x)?;
        let ri = crate::polyhedron::joint_ri_nonempty(&[p1.clone(), p2.clone()])?;
        Ok(u64::from(basic && !ri))
    });
    counts.into_iter().try_fold(0, |acc, c| Ok(acc + c?))
}
