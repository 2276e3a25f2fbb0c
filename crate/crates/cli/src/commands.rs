//! One function per subcommand. Each prints a human summary to stdout and,
//! with `--report`, writes the JSON report.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use num::BigRational;
use serde::Serialize;
use serde_json::json;
use wrinkle_core::acceptance::{run_acceptance, AcceptanceConfig};
use wrinkle_core::cover::{branch_points, canonical_paths, trace_collision, BasePath};
use wrinkle_core::homology::SurfaceModel;
use wrinkle_core::jetstab::{jet_report, Family, JetClass};
use wrinkle_core::models::{
    get_form, get_model, params_from_pairs, CriticalSet, FormId, ModelId, Params,
};
use wrinkle_core::moves::{builtin_script, run_script, MoveScript, BUILTIN_SCRIPTS};
use wrinkle_core::nearsymp::{verify_claims, CheckResult};
use wrinkle_core::singular::{classify as classify_point, critical_values, cusp_locations};
use wrinkle_core::symcalc::{format_rational, parse_rational, rat_to_f64};
use wrinkle_core::Error;

use crate::output::{to_json, write_atomic};
use crate::svg;
use crate::RunArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Fail => ExitCode::from(1),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad identifier, parameter or argument: exit 2.
    Usage(String),
    /// The computation itself failed: exit 1.
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failed(_) => ExitCode::from(1),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::UnknownId(_)
            | Error::ParamOutOfRange { .. }
            | Error::UnboundVariable(_)
            | Error::NotCritical(_)
            | Error::DimensionMismatch(..) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit<T: Serialize>(run: &RunArgs, report: &T) -> Result<(), CliError> {
    if let Some(path) = &run.report {
        write_atomic(path, to_json(report).as_bytes())
            .map_err(|e| CliError::Failed(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}

fn parse_params(pairs: &[String]) -> Result<Params, CliError> {
    let split: Vec<(&str, &str)> = pairs
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| usage(format!("--param expects name=p/q, got `{p}`")))
        })
        .collect::<Result<_, _>>()?;
    Ok(params_from_pairs(&split)?)
}

fn parse_delta(run: &RunArgs) -> Result<BigRational, CliError> {
    let d = parse_rational(&run.delta)?;
    if d <= BigRational::from_integer(0.into()) {
        return Err(usage("--delta must be positive"));
    }
    Ok(d)
}

fn rationals(src: &str, n: usize) -> Result<Vec<BigRational>, CliError> {
    let v: Vec<BigRational> = src
        .split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(usage(format!(
            "expected {n} comma-separated values, got `{src}`"
        )));
    }
    Ok(v)
}

fn check_line(c: &CheckResult) -> String {
    let verdict = if c.status.passed() { "PASS" } else { "FAIL" };
    let mut line = format!("{verdict} {} margin={:e}", c.name, c.margin);
    if !c.status.passed() && !c.witness.is_empty() {
        line.push_str(&format!(" at ({})", c.witness.join(", ")));
    }
    line
}

pub fn verify_form(run: &RunArgs, form: &str, params: &[String]) -> CmdResult {
    let id = FormId::from_name(form)?;
    let entry = get_form(id, &parse_params(params)?)?;
    let delta = parse_delta(run)?;
    let report = verify_claims(&entry, run.samples, run.seed, &delta)?;
    for c in &report.checks {
        println!("{}", check_line(c));
    }
    emit(run, &report)?;
    Ok(Outcome::from_bool(report.passed()))
}

pub fn critset(
    run: &RunArgs,
    model: &str,
    params: &[String],
    svg_path: Option<&Path>,
    points: usize,
) -> CmdResult {
    let id = ModelId::from_name(model)?;
    let params = parse_params(params)?;
    let m = get_model(id, &params)?;
    let samples = critical_values(&m, points)?;
    let empty = m.critical_set == Some(CriticalSet::Empty) || samples.is_empty();
    let cusps: Vec<[f64; 2]> = match &m.critical_set {
        Some(CriticalSet::Origin) | Some(CriticalSet::Empty) => Vec::new(),
        _ => cusp_locations(&m)?.into_iter().map(|(_, _, p)| p).collect(),
    };
    let mut curves: Vec<Vec<[f64; 2]>> = Vec::new();
    for s in &samples {
        if curves.len() <= s.piece {
            curves.resize(s.piece + 1, Vec::new());
        }
        curves[s.piece].push(s.value);
    }
    if empty {
        eprintln!("warning: {model} has no critical points for these parameters");
    }
    println!("model {model}");
    println!("pieces {}", curves.len());
    println!("cusps {}", cusps.len());
    for c in &cusps {
        println!("cusp {} {}", fixed(c[0]), fixed(c[1]));
    }
    if let Some(path) = svg_path {
        let binding: Vec<String> = params
            .iter()
            .map(|(v, q)| format!("{}={}", v.name(), format_rational(q)))
            .collect();
        let title = format!("{model} {}", binding.join(" "));
        write_atomic(path, svg::render(title.trim(), &curves, &cusps).as_bytes())
            .map_err(|e| CliError::Failed(format!("writing {}: {e}", path.display())))?;
    }
    let report = json!({
        "model": model,
        "params": params.iter().map(|(v, q)| (v.name().to_string(), format_rational(q))).collect::<std::collections::BTreeMap<_, _>>(),
        "empty": empty,
        "cusps": cusps,
        "samples": samples,
    });
    emit(run, &report)?;
    Ok(Outcome::Pass)
}

pub fn classify(run: &RunArgs, model: &str, params: &[String], point: &str) -> CmdResult {
    let id = ModelId::from_name(model)?;
    let m = get_model(id, &parse_params(params)?)?;
    let p = rationals(point, 4)?;
    let p: [BigRational; 4] = p.try_into().expect("four coordinates");
    let kind = classify_point(&m, &p)?;
    println!("{:?}", kind.tag);
    for (k, v) in &kind.certificate {
        println!("  {k} = {v}");
    }
    emit(run, &kind)?;
    Ok(Outcome::Pass)
}

fn plane_point(src: &str) -> Result<[f64; 2], CliError> {
    let v = rationals(src, 2)?;
    Ok([rat_to_f64(&v[0]), rat_to_f64(&v[1])])
}

pub fn cover(
    run: &RunArgs,
    s: f64,
    w: Option<&str>,
    path: Option<&str>,
    steps: usize,
) -> CmdResult {
    if let Some(name) = path {
        let chosen: Vec<(&str, BasePath)> = canonical_paths()
            .into_iter()
            .filter(|(n, _)| name == "all" || *n == name)
            .collect();
        if chosen.is_empty() {
            return Err(usage(format!(
                "unknown path `{name}` (real, upper, lower, all)"
            )));
        }
        let mut out = Vec::new();
        let mut ok = true;
        for (n, p) in chosen {
            match trace_collision(s, &p, steps) {
                Ok(c) => {
                    println!(
                        "{n}: points {} and {} collide at u={:.9}",
                        c.pair.0, c.pair.1, c.param
                    );
                    out.push(json!({"path": n, "collision": c}));
                }
                Err(e) => {
                    ok = false;
                    println!("{n}: {e}");
                    out.push(json!({"path": n, "error": e.to_string()}));
                }
            }
        }
        emit(run, &out)?;
        return Ok(Outcome::from_bool(ok));
    }
    let w = plane_point(w.unwrap_or("-1/2,0"))?;
    let set = branch_points(s, w);
    println!("{} branch points", set.points.len());
    for p in &set.points {
        println!(
            "  t={:.15} x={:.15} multiplicity {}",
            p.t, p.x, p.multiplicity
        );
    }
    emit(run, &set)?;
    Ok(Outcome::Pass)
}

pub fn monodromy(run: &RunArgs, surface: &str, word: &str, apply: &str) -> CmdResult {
    let s = SurfaceModel::by_name(surface)?;
    let w = s.parse_word(word)?;
    let x = s.parse_class(apply)?;
    let image = s.apply_word(&w, &x)?;
    let shown = s.format_class(&image);
    println!("{shown}");
    emit(
        run,
        &json!({
            "surface": surface,
            "word": s.format_word(&w),
            "input": s.format_class(&x),
            "image": shown,
            "coordinates": image,
        }),
    )?;
    Ok(Outcome::Pass)
}

pub fn jet(run: &RunArgs, family: &str, a: &str, b: &str) -> CmdResult {
    let family: Family = family.parse()?;
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    let r = jet_report(family, &a, &b)?;
    println!("family {family} a={} b={}", r.a, r.b);
    println!("rank {}/7", r.rank);
    println!("{}", r.class);
    if let Some(nf) = &r.normal_form {
        println!("normal form {nf}{}", r.quadratic_block);
    }
    if r.class == JetClass::NotStable {
        println!("missing {}", r.missing.join(" "));
    }
    emit(run, &r)?;
    Ok(Outcome::Pass)
}

fn load_script(src: &str) -> Result<MoveScript, CliError> {
    if let Some(name) = src.strip_prefix("builtin:") {
        return Ok(builtin_script(name)?);
    }
    let text = std::fs::read_to_string(src).map_err(|e| usage(format!("reading {src}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{src}: {e}")))
}

pub fn moves_run(run: &RunArgs, script: &str, out: Option<&Path>) -> CmdResult {
    let script = load_script(script)?;
    let outcome = run_script(&script)?;
    for t in &outcome.trace {
        println!(
            "step {} {} [{}]  cusps {}->{}  regions {}->{}",
            t.step,
            t.kind.name(),
            t.site.join(", "),
            t.before.cusps,
            t.after.cusps,
            t.before.regions,
            t.after.regions
        );
    }
    match outcome.matches_expected {
        Some(m) => println!("matches expected: {m}"),
        None => println!("no expected diagram"),
    }
    if let Some(path) = out {
        write_atomic(path, to_json(&outcome.final_diagram).as_bytes())
            .map_err(|e| CliError::Failed(format!("writing {}: {e}", path.display())))?;
    }
    emit(
        run,
        &json!({
            "name": script.name,
            "trace": outcome.trace,
            "matches_expected": outcome.matches_expected,
            "final": outcome.final_diagram,
        }),
    )?;
    Ok(Outcome::from_bool(outcome.matches_expected != Some(false)))
}

pub fn moves_list() -> CmdResult {
    for n in BUILTIN_SCRIPTS {
        println!("builtin:{n}");
    }
    Ok(Outcome::Pass)
}

pub fn acceptance(run: &RunArgs) -> CmdResult {
    let cfg = AcceptanceConfig {
        seed: run.seed,
        samples: run.samples,
        delta: parse_delta(run)?,
        ..AcceptanceConfig::default()
    };
    let report = run_acceptance(&cfg);
    for line in report.summary() {
        println!("{line}");
    }
    emit(run, &report)?;
    Ok(Outcome::from_bool(report.passed()))
}

/// Twelve decimals, without a sign on values that round to zero.
fn fixed(v: f64) -> String {
    let s = format!("{v:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}
