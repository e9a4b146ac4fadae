//! One line per acceptance criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use convexcalc_core::calculus::{
    closed_form_subdiff, fermat_check, intersection_rule, minimize, normal_cone, oracle_subgradient, subdifferential,
    MaxAffineFunction, Piece, Verdict,
};
use convexcalc_core::exact::rat::frac;
use convexcalc_core::exact::{Rat, RatVector};
use convexcalc_core::gallery::{ball_subdiff_1d, ball_subdiff_member, parabola_counterexample};
use convexcalc_core::oracle::{fuzz_until, qc_strictness, stream_rng, Gen, InstanceSpec, RuleKind};
use convexcalc_core::par::ExecMode;
use convexcalc_core::polyhedron::{
    dd_convert_back, joint_ri_nonempty, joint_ri_point, set_equal, Cone, HPolyhedron, VPolyhedron,
};
use convexcalc_core::separation::{certify, check_basic_qc, euclid_project, properly_separate, variational_gap};
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn line_fixture() -> (HPolyhedron, HPolyhedron, RatVector) {
    let omega1 = HPolyhedron::from_ints(2, &[], &[(&[0, 1], 0)]);
    let omega2 = HPolyhedron::from_ints(2, &[(&[1, 0], 0)], &[(&[0, 1], 0)]);
    (omega1, omega2, RatVector::zeros(2))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (o1, o2, x) = line_fixture();
    let n1 = normal_cone(&o1, &x).map_err(e)?;
    let n2 = normal_cone(&o2, &x).map_err(e)?;
    let y_axis = Cone::new(2, vec![], vec![RatVector::from_ints(&[0, 1])]).map_err(e)?;
    let half = Cone::new(2, vec![RatVector::from_ints(&[1, 0])], vec![RatVector::from_ints(&[0, 1])]).map_err(e)?;
    ensure(set_equal(&n1, &y_axis).map_err(e)?, "N(x; Ω1) is not {0}×ℝ")?;
    ensure(set_equal(&n2, &half).map_err(e)?, "N(x; Ω2) is not [0,∞)×ℝ")?;
    ensure(!check_basic_qc(&o1, &o2, &x).map_err(e)?, "basic qualification unexpectedly holds")?;
    let joint = joint_ri_point(&[o1.clone(), o2.clone()]).map_err(e)?;
    ensure(joint.is_some(), "strict-slack LP found no common relative interior point")?;
    let report = intersection_rule(&[o1, o2], &x).map_err(e)?;
    ensure(report.verdict == Verdict::Equal, format!("verdict {:?}", report.verdict))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("ri point {}, verdict Equal", joint.unwrap()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let g = parabola_counterexample().map_err(e)?;
    ensure(g.report.verdict == Verdict::RhsStrictlySmaller, format!("verdict {:?}", g.report.verdict))?;
    ensure(g.report.witness == Some(RatVector::from_ints(&[1, 0])), format!("witness {:?}", g.report.witness))?;
    ensure(!g.report.qualification_holds, "qualification reported as holding")?;
    ensure(g.probes_pass, "a grid probe failed")?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("RhsStrictlySmaller, witness (1,0), probes pass".into())
}

fn criterion_3() -> Outcome {
    let zero = RatVector::zeros(2);
    let v = |a: (i64, i64), b: (i64, i64)| RatVector::new(vec![frac(a.0, a.1), frac(b.0, b.1)]);
    let inside = [
        v((3, 5), (4, 5)),
        v((-4, 5), (3, 5)),
        v((5, 13), (-12, 13)),
        v((1, 1), (0, 1)),
        v((0, 1), (-1, 1)),
        v((0, 1), (0, 1)),
        v((1, 2), (1, 2)),
        v((-7, 25), (-24, 25)),
        v((8, 17), (15, 17)),
        v((-1, 3), (2, 3)),
    ];
    let outside = [
        v((1, 1), (1, 1)),
        v((3, 5), (5, 6)),
        v((-1, 1), (1, 100)),
        v((2, 1), (0, 1)),
        v((0, 1), (-101, 100)),
        v((5, 7), (5, 7)),
        v((-9, 10), (-1, 2)),
        v((13, 12), (0, 1)),
        v((7, 10), (3, 4)),
        v((-3, 5), (-5, 6)),
    ];
    for m in &inside {
        ensure(ball_subdiff_member(m, &zero), format!("rejected {m}"))?;
    }
    for m in &outside {
        ensure(!ball_subdiff_member(m, &zero), format!("accepted {m}"))?;
    }
    let abs = MaxAffineFunction::from_ints(1, &[(&[1], 0), (&[-1], 0)]);
    let sub = subdifferential(&abs, &RatVector::zeros(1)).map_err(e)?;
    ensure(set_equal(&sub, &ball_subdiff_1d()).map_err(e)?, "∂|·|(0) differs from [−1,1]")?;
    Ok("10 accepted, 10 rejected, ∂|·|(0) = [−1,1]".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for kind in RuleKind::ALL {
        let spec = InstanceSpec { dims: [3, 3, 3], ..InstanceSpec::with_seed(2024) };
        let r = fuzz_until(kind, &spec, 50, 400, ExecMode::Parallel);
        ensure(r.qualified_trials >= 50, format!("{}: only {} qualified trials", kind.name(), r.qualified_trials))?;
        if let Some(f) = r.failures.first() {
            return Err(format!("{}: trial {} {:?}: {}", kind.name(), f.trial, f.verdict, f.reason));
        }
        ensure(r.equal_count == r.qualified_trials, format!("{}: {} of {} equal", kind.name(), r.equal_count, r.qualified_trials))?;
        parts.push(format!("{} {}/{}", kind.name(), r.equal_count, r.qualified_trials));
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{} in {:.1?}", parts.join(", "), start.elapsed()))
}

/// A seeded max-affine function with `x` in its domain.
fn seeded_function(seed: u64, trial: u64) -> (MaxAffineFunction, RatVector) {
    let mut rng = stream_rng(seed, trial);
    let spec = InstanceSpec::with_seed(seed);
    let mut g = Gen::new(&mut rng, &spec);
    let n = g.int(1, 3) as usize;
    let x = g.int_vector(n);
    let domain = if g.chance(0.5) {
        HPolyhedron::universe(n)
    } else {
        let anchor = g.vector(n);
        g.set_through(&anchor, &x)
    };
    let value = g.rat();
    (g.function_at(&x, &value, domain), x)
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for trial in 0..100 {
        let (f, x) = seeded_function(5, trial);
        let engine = subdifferential(&f, &x).map_err(e)?;
        let closed = closed_form_subdiff(&f, &x).map_err(e)?;
        ensure(set_equal(&engine, &closed).map_err(e)?, format!("trial {trial}: routes disagree"))?;
        for m in engine.sample_members() {
            ensure(oracle_subgradient(&m, &f, &x).map_err(e)?, format!("trial {trial}: {m} fails the oracle"))?;
            checked += 1;
        }
    }
    Ok(format!("100 instances equal, {checked} emitted members oracle-verified"))
}

/// Hull of a few random rational points.
fn seeded_polytope(g: &mut Gen<'_>, n: usize) -> Result<(VPolyhedron, HPolyhedron), String> {
    let count = g.int(1, 5) as usize;
    let v = VPolyhedron::from_points(n, (0..count).map(|_| g.vector(n)).collect()).map_err(e)?;
    let h = dd_convert_back(&v).map_err(e)?;
    Ok((v, h))
}

fn convex_combination(rng: &mut rand_chacha::ChaCha8Rng, points: &[RatVector]) -> RatVector {
    let weights: Vec<i64> = points.iter().map(|_| rng.gen_range(0..=5)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let mut out = RatVector::zeros(points[0].dim());
    for (p, &w) in points.iter().zip(&weights) {
        out = out.add_scaled(&frac(w, total), p);
    }
    if weights.iter().all(|&w| w == 0) {
        points[0].clone()
    } else {
        out
    }
}

fn criterion_6() -> Outcome {
    for trial in 0..50 {
        let mut rng = stream_rng(6, trial);
        let spec = InstanceSpec::with_seed(6);
        let (v, h, x) = {
            let mut g = Gen::new(&mut rng, &spec);
            let n = g.int(1, 3) as usize;
            let (v, h) = seeded_polytope(&mut g, n)?;
            let x = g.vector(n);
            (v, h, x)
        };
        let proj = euclid_project(&x, &h).map_err(e)?;
        let gap = variational_gap(&x, &h, &proj.point).map_err(e)?;
        ensure(gap == Some(Rat::zero()), format!("trial {trial}: gap {gap:?}"))?;
        for _ in 0..50 {
            let w = convex_combination(&mut rng, v.points());
            ensure((&x - &w).norm_squared() >= proj.squared_distance, format!("trial {trial}: {w} is closer"))?;
        }
    }
    Ok("50 pairs: gap exactly 0, 2500 probes never closer".into())
}

fn criterion_7() -> Outcome {
    let (mut separated, mut not) = (0, 0);
    for trial in 0..50 {
        let mut rng = stream_rng(7, trial);
        let spec = InstanceSpec::with_seed(7);
        let mut g = Gen::new(&mut rng, &spec);
        let n = g.int(1, 3) as usize;
        let (v1, p1) = seeded_polytope(&mut g, n)?;
        let (_, mut p2) = seeded_polytope(&mut g, n)?;
        if g.chance(0.3) {
            // Share a vertex so touching pairs are exercised.
            let shared = VPolyhedron::from_points(n, [dd_convert_v(&p2)?, vec![v1.points()[0].clone()]].concat())
                .map_err(e)?;
            p2 = dd_convert_back(&shared).map_err(e)?;
        }
        let outcome = properly_separate(&p1, &p2).map_err(e)?;
        let disjoint = !joint_ri_nonempty(&[p1.clone(), p2.clone()]).map_err(e)?;
        ensure(outcome.is_separated() == disjoint, format!("trial {trial}: separation {} vs ri-disjoint {disjoint}", outcome.is_separated()))?;
        match outcome {
            convexcalc_core::separation::SeparationOutcome::Separated { certificate } => {
                let again = certify(&certificate.v, &p1, &p2).map_err(e)?;
                ensure(again == certificate && again.is_proper(), format!("trial {trial}: certificate does not re-verify"))?;
                separated += 1;
            }
            convexcalc_core::separation::SeparationOutcome::NotSeparable => not += 1,
        }
    }
    Ok(format!("50 pairs agree ({separated} separated, {not} not), certificates re-verified"))
}

fn dd_convert_v(h: &HPolyhedron) -> Result<Vec<RatVector>, String> {
    Ok(convexcalc_core::polyhedron::dd_convert(h).map_err(e)?.points().to_vec())
}

fn criterion_8() -> Outcome {
    let bad = qc_strictness(8, 200, ExecMode::Parallel).map_err(e)?;
    ensure(bad == 0, format!("{bad} instances with basic QC true and ri QC false"))?;
    let (o1, o2, x) = line_fixture();
    ensure(joint_ri_nonempty(&[o1.clone(), o2.clone()]).map_err(e)?, "fixture: ri QC false")?;
    ensure(!check_basic_qc(&o1, &o2, &x).map_err(e)?, "fixture: basic QC true")?;
    Ok("0 of 200 instances violate, fixture has ri QC without basic QC".into())
}

fn criterion_9() -> Outcome {
    for trial in 0..50 {
        let (f, _) = seeded_function(9, trial);
        let n = f.n();
        // Steep pieces ±4eᵢ keep the function bounded below.
        let mut pieces = f.pieces().to_vec();
        for i in 0..n {
            let e = RatVector::unit(n, i).scale(&Rat::from_integer(4.into()));
            pieces.push(Piece::new(e.clone(), Rat::zero()));
            pieces.push(Piece::new(-e, Rat::zero()));
        }
        let f = MaxAffineFunction::new(n, pieces, HPolyhedron::universe(n)).map_err(e)?;
        let (x, value) = minimize(&f).map_err(e)?.ok_or(format!("trial {trial}: reported unbounded below"))?;
        ensure(fermat_check(&f, &x).map_err(e)?, format!("trial {trial}: minimizer fails the Fermat check"))?;
        let mut step = Rat::one();
        let moved = loop {
            let y = x.add_scaled(&step, &RatVector::unit(n, 0));
            if f.value(&y).map_err(e)?.is_some_and(|v| v > value) {
                break y;
            }
            step *= Rat::from_integer(2.into());
        };
        ensure(!fermat_check(&f, &moved).map_err(e)?, format!("trial {trial}: non-minimizer {moved} passes"))?;
    }
    Ok("50 minimizers pass, 50 perturbed points fail".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("normal cones of the two lines and the intersection rule", criterion_1),
        ("parabola counterexample", criterion_2),
        ("Euclidean norm subdifferential", criterion_3),
        ("rule fuzz suites", criterion_4),
        ("epigraph route against the closed form", criterion_5),
        ("projection contract", criterion_6),
        ("separation dichotomy", criterion_7),
        ("qualification strictness", criterion_8),
        ("Fermat rule", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
