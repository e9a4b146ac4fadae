use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use convexcalc_core::calculus::{
    chain_rule_affine, fermat_check, intersection_rule, max_rule, minimize, normal_cone, subdifferential, sum_rule,
    MaxAffineFunction, RuleReport,
};
use convexcalc_core::exact::RatVector;
use convexcalc_core::gallery::{ball_subdiff_1d, ball_subdiff_member, parabola_counterexample};
use convexcalc_core::oracle::{fuzz, FuzzReport, InstanceSpec, RuleKind};
use convexcalc_core::par::ExecMode;
use convexcalc_core::polyhedron::{affine_hull, dd_convert_back, ri_point, set_equal, AffineMap, HPolyhedron, VPolyhedron};
use convexcalc_core::separation::{euclid_project, properly_separate, strictly_separate};
use convexcalc_core::setvalued::{
    coderivative_chain, coderivative_intersect, coderivative_sum, componentwise_chain, domain_normal,
    optimal_value_subdiff, preimage_normal, solution_map_coderivative, PolyhedralMap,
};

const VERBS: &str = "ri-point, affine-hull, project, separate, normal-cone, subdiff, fermat, \
rule:intersection, rule:sum, rule:chain, rule:max, rule:optimal-value, rule:componentwise, rule:preimage, \
rule:cod-sum, rule:cod-chain, rule:cod-intersect, rule:domain, rule:solution-map, gallery, fuzz";

/// Exact normal cones, subdifferentials and coderivatives of polyhedral data.
///
/// Prints one JSON document per run. Exit status: 0 on success or an Equal verdict,
/// 1 when the two sides of a rule differ or a fuzz run fails, 2 on bad input.
#[derive(Parser, Debug)]
#[command(name = "convexcalc", version, after_help = format!("Verbs: {VERBS}"))]
struct Task {
    /// Operation to run.
    verb: String,
    /// Polyhedron files (H-representation, or V-representation with `points`).
    #[arg(long, num_args = 1..)]
    set: Vec<PathBuf>,
    /// Max-affine function files.
    #[arg(long, num_args = 1..)]
    fns: Vec<PathBuf>,
    /// Set-valued map files, or an affine map file for rule:chain.
    #[arg(long, num_args = 1..)]
    map: Vec<PathBuf>,
    /// Base point x̄ as a JSON array, e.g. "[0,\"1/2\"]".
    #[arg(long)]
    point: Option<String>,
    /// Base output ȳ (z̄ for rule:cod-chain) for rules over set-valued maps.
    #[arg(long)]
    image: Option<String>,
    /// Direction v (w for rule:cod-chain) at which coderivatives are taken.
    #[arg(long)]
    dir: Option<String>,
    /// Rule id for fuzz; all rules when omitted.
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Dimension caps "n,p,q".
    #[arg(long, default_value = "2,2,2")]
    dims: String,
    /// Fuzz with families that break the relative-interior qualification.
    #[arg(long)]
    unqualified: bool,
    /// Run fuzz trials on one thread.
    #[arg(long)]
    sequential: bool,
    /// Also write the JSON document to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Output {
    doc: Value,
    code: u8,
}

impl Output {
    fn ok(value: impl Serialize) -> anyhow::Result<Output> {
        Ok(Output { doc: serde_json::to_value(value)?, code: 0 })
    }

    fn report(report: RuleReport) -> anyhow::Result<Output> {
        let code = if report.is_equal() { 0 } else { 1 };
        Ok(Output { doc: serde_json::to_value(report)?, code })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Reads an H-representation, or converts a V-representation when the file has `points`.
fn read_set(path: &Path) -> anyhow::Result<HPolyhedron> {
    let raw: Value = read_json(path)?;
    if raw.get("points").is_some() {
        let v: VPolyhedron = serde_json::from_value(raw).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        return Ok(dd_convert_back(&v)?);
    }
    serde_json::from_value(raw).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn parse_vector(flag: &str, text: Option<&String>) -> anyhow::Result<RatVector> {
    let text = text.ok_or_else(|| anyhow!("--{flag} is required"))?;
    serde_json::from_str(text).map_err(|e| anyhow!("--{flag}: {e}"))
}

fn parse_dims(text: &str) -> anyhow::Result<[usize; 3]> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow!("--dims: {s:?} is not a count")))
        .collect::<anyhow::Result<_>>()?;
    match parts.as_slice() {
        [n] => Ok([*n, *n, *n]),
        [n, p, q] if parts.iter().all(|&d| d > 0) => Ok([*n, *p, *q]),
        _ => bail!("--dims: expected \"n,p,q\" with positive entries"),
    }
}

fn many<T>(paths: &[PathBuf], flag: &str, count: Option<usize>, read: impl Fn(&Path) -> anyhow::Result<T>) -> anyhow::Result<Vec<T>> {
    if let Some(c) = count {
        if paths.len() != c {
            bail!("--{flag}: expected {c} file(s), found {}", paths.len());
        }
    } else if paths.is_empty() {
        bail!("--{flag} is required");
    }
    paths.iter().map(|p| read(p)).collect()
}

fn sets(task: &Task, count: Option<usize>) -> anyhow::Result<Vec<HPolyhedron>> {
    many(&task.set, "set", count, read_set)
}

fn functions(task: &Task, count: Option<usize>) -> anyhow::Result<Vec<MaxAffineFunction>> {
    many(&task.fns, "fns", count, read_json)
}

fn maps(task: &Task, count: Option<usize>) -> anyhow::Result<Vec<PolyhedralMap>> {
    many(&task.map, "map", count, read_json)
}

fn run(task: &Task) -> anyhow::Result<Output> {
    let point = || parse_vector("point", task.point.as_ref());
    let image = || parse_vector("image", task.image.as_ref());
    let dir = || parse_vector("dir", task.dir.as_ref());
    match task.verb.as_str() {
        "ri-point" => Output::ok(ri_point(&sets(task, Some(1))?[0])?),
        "affine-hull" => Output::ok(affine_hull(&sets(task, Some(1))?[0])?),
        "project" => Output::ok(euclid_project(&point()?, &sets(task, Some(1))?[0])?),
        "separate" => {
            let s = sets(task, None)?;
            match (s.as_slice(), &task.point) {
                ([p], Some(_)) => Output::ok(strictly_separate(&point()?, p)?),
                ([p1, p2], None) => Output::ok(properly_separate(p1, p2)?),
                _ => bail!("separate takes --set P --point x, or two --set files"),
            }
        }
        "normal-cone" => Output::ok(normal_cone(&sets(task, Some(1))?[0], &point()?)?),
        "subdiff" => Output::ok(subdifferential(&functions(task, Some(1))?[0], &point()?)?),
        "fermat" => {
            let f = &functions(task, Some(1))?[0];
            let (x, value) = match &task.point {
                Some(_) => {
                    let x = point()?;
                    let value = f.value(&x)?;
                    (x, value)
                }
                None => match minimize(f)? {
                    Some((x, value)) => (x, Some(value)),
                    None => return Output::ok(json!({ "bounded_below": false })),
                },
            };
            let holds = fermat_check(f, &x)?;
            let sub = subdifferential(f, &x)?;
            Output::ok(json!({ "point": x, "value": value.map(|v| v.to_string()), "fermat": holds, "subdifferential": sub }))
        }
        "rule:intersection" => Output::report(intersection_rule(&sets(task, None)?, &point()?)?),
        "rule:sum" => Output::report(sum_rule(&functions(task, None)?, &point()?)?),
        "rule:max" => Output::report(max_rule(&functions(task, None)?, &point()?)?),
        "rule:chain" => {
            let f = &functions(task, Some(1))?[0];
            let b: AffineMap = many(&task.map, "map", Some(1), read_json)?.remove(0);
            Output::report(chain_rule_affine(f, &b, &point()?)?)
        }
        "rule:optimal-value" => {
            let phi = &functions(task, Some(1))?[0];
            let f = &maps(task, Some(1))?[0];
            Output::report(optimal_value_subdiff(phi, f, &point()?)?)
        }
        "rule:componentwise" => {
            let fs = functions(task, None)?;
            if fs.len() < 2 {
                bail!("--fns: expected the outer function followed by the inner ones");
            }
            Output::report(componentwise_chain(&fs[0], &fs[1..], &point()?)?)
        }
        "rule:preimage" => {
            let f = &maps(task, Some(1))?[0];
            let theta = &sets(task, Some(1))?[0];
            Output::report(preimage_normal(f, theta, &point()?, &image()?)?)
        }
        "rule:cod-sum" => {
            let m = maps(task, Some(2))?;
            Output::report(coderivative_sum(&m[0], &m[1], &point()?, &image()?, &dir()?)?)
        }
        "rule:cod-chain" => {
            let m = maps(task, Some(2))?;
            Output::report(coderivative_chain(&m[0], &m[1], &point()?, &image()?, &dir()?)?)
        }
        "rule:cod-intersect" => {
            let m = maps(task, Some(2))?;
            Output::report(coderivative_intersect(&m[0], &m[1], &point()?, &image()?, &dir()?)?)
        }
        "rule:domain" => Output::report(domain_normal(&maps(task, Some(1))?[0], &point()?)?),
        "rule:solution-map" => {
            let m = maps(task, Some(2))?;
            Output::report(solution_map_coderivative(&m[0], &m[1], &point()?, &image()?, &dir()?)?)
        }
        "gallery" => gallery(),
        "fuzz" => run_fuzz(task),
        other => bail!("unknown verb {other:?}; expected one of: {VERBS}"),
    }
}

fn gallery() -> anyhow::Result<Output> {
    let parabola = parabola_counterexample()?;
    let abs = MaxAffineFunction::from_ints(1, &[(&[1], 0), (&[-1], 0)]);
    let interval = ball_subdiff_1d();
    let matches_abs = set_equal(&subdifferential(&abs, &RatVector::zeros(1))?, &interval)?;
    let zero = RatVector::zeros(2);
    let probes: Vec<Value> = [[3, 5, 4, 5], [1, 1, 0, 1], [1, 2, -1, 2], [1, 1, 1, 1]]
        .iter()
        .map(|&[a, b, c, d]| {
            let v = RatVector::new(vec![
                convexcalc_core::exact::rat::frac(a, b),
                convexcalc_core::exact::rat::frac(c, d),
            ]);
            json!({ "v": v, "member": ball_subdiff_member(&v, &zero) })
        })
        .collect();
    Ok(Output {
        doc: json!([
            {
                "id": "ball-norm",
                "citation": "subdifferential of the Euclidean norm at the origin is the closed unit ball",
                "point": zero,
                "probes": probes,
                "subdiff_1d": interval,
                "matches_abs_at_zero": matches_abs,
            },
            {
                "id": "parabola-pair",
                "citation": "epigraph and hypograph of x^2 meet at the origin; the intersection rule fails without a qualification",
                "report": parabola.report,
                "upper": parabola.upper,
                "lower": parabola.lower,
                "meet": parabola.meet,
                "probes_pass": parabola.probes_pass,
            },
        ]),
        code: 0,
    })
}

fn run_fuzz(task: &Task) -> anyhow::Result<Output> {
    let kinds: Vec<RuleKind> = match &task.rule {
        None => RuleKind::ALL.to_vec(),
        Some(name) => {
            let name = name.strip_prefix("rule:").unwrap_or(name);
            vec![RuleKind::parse(name).ok_or_else(|| anyhow!("--rule: unknown rule {name:?}"))?]
        }
    };
    let spec = InstanceSpec {
        seed: task.seed,
        dims: parse_dims(&task.dims)?,
        qualified: !task.unqualified,
        ..InstanceSpec::default()
    };
    let mode = if task.sequential { ExecMode::Sequential } else { ExecMode::Parallel };
    let reports: Vec<FuzzReport> = kinds.into_iter().map(|k| fuzz(k, &spec, task.trials, mode)).collect();
    let code = if reports.iter().all(FuzzReport::passed) { 0 } else { 1 };
    let doc = if reports.len() == 1 { serde_json::to_value(&reports[0])? } else { serde_json::to_value(&reports)? };
    Ok(Output { doc, code })
}

fn main() -> ExitCode {
    let task = Task::parse();
    match run(&task) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.doc).expect("JSON values serialize");
            if let Some(path) = &task.out {
                if let Err(e) = fs::write(path, format!("{text}\n")) {
                    eprintln!("{}", json!({ "error": format!("{}: {e}", path.display()) }));
                    return ExitCode::from(2);
                }
            }
            println!("{text}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}
