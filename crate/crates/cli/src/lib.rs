//! Subcommand implementations for the `hyperfrac` binary.
//!
//! Every command returns a [`RunReport`]; `outcome` is `pass` exactly when
//! every check the command performed held. Certificates are written once,
//! after all work finishes, as pretty JSON with fraction-string scalars.

pub mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hyperfrac_core::coded_family::{epsilon_for_k, expand, Code};
use hyperfrac_core::formats::{AnySet, SetFile};
use hyperfrac_core::hutchinson::{iterate_weak, solve_attractor, AttractorResult};
use hyperfrac_core::hyperspace::{hausdorff_distance, hausdorff_distance_d, CompactSet1D, CompactSetD};
use hyperfrac_core::maps::Ifs;
use hyperfrac_core::scalar::Scalar;
use hyperfrac_core::theorems::{
    replay, run_thm41_trials, summarize, thm41_witness_search, Certificate, CountingParams, Prop32Certificate,
    Prop33Certificate, ReplayReport, SampleParams, Thm41Certificate, Thm41TrialConfig,
};

/// Caps the worker pool.
pub const WORKERS_ENV: &str = "HYPERFRAC_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub outcome: Outcome,
    pub certificate: Option<String>,
    pub wall_time_ms: f64,
    pub details: Value,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

struct Run {
    command: &'static str,
    started: Instant,
    inputs: Vec<InputDigest>,
}

impl Run {
    fn new(command: &'static str) -> Self {
        Run { command, started: Instant::now(), inputs: Vec::new() }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn finish(self, ok: bool, certificate: Option<&Path>, details: Value) -> RunReport {
        RunReport {
            command: self.command.to_string(),
            inputs: self.inputs,
            outcome: Outcome::from_bool(ok),
            certificate: certificate.map(|p| p.display().to_string()),
            wall_time_ms: self.started.elapsed().as_secs_f64() * 1e3,
            details,
        }
    }
}

/// Accepts `p/q`, decimals, integers and `b^e` with integer `b`, `e`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let base = Scalar::from_str(base.trim()).map_err(|e| anyhow!("{e}"))?;
        let exp: i32 = exp.trim().trim_start_matches('(').trim_end_matches(')').parse()?;
        let p = base.pow(exp.unsigned_abs());
        return Ok(if exp < 0 { &Scalar::one() / &p } else { p });
    }
    Scalar::from_str(s).map_err(|e| anyhow!("{e}"))
}

/// Comma-separated coordinates.
pub fn parse_point(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(parse_scalar).collect()
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_json(v)?).with_context(|| format!("writing {}", path.display()))
}

fn parse_set_file(text: &str) -> Result<AnySet> {
    let f: SetFile = serde_json::from_str(text)?;
    Ok(f.into_any()?)
}

fn scalar_json(x: &Scalar) -> Value {
    json!({ "exact": x.to_fraction_string(), "decimal": x.to_f64() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttractorReport {
    pub iterations: usize,
    pub bound: Option<Scalar>,
    pub converged: bool,
    pub stalled: bool,
    pub attractor: CompactSet1D,
}

impl From<AttractorResult> for AttractorReport {
    fn from(r: AttractorResult) -> Self {
        AttractorReport {
            iterations: r.iterations,
            bound: r.a_posteriori_bound,
            converged: r.converged,
            stalled: r.stalled,
            attractor: r.attractor,
        }
    }
}

pub struct AttractorArgs<'a> {
    pub spec: &'a Path,
    pub tol: &'a Scalar,
    pub weak: bool,
    pub max_iter: usize,
    pub start: Option<&'a Path>,
    pub out: Option<&'a Path>,
}

pub fn cmd_attractor(args: &AttractorArgs) -> Result<RunReport> {
    let mut run = Run::new("attractor");
    let ifs: Ifs = serde_json::from_str(&run.read(args.spec)?).context("parsing IFS file")?;
    let start = match args.start {
        Some(p) => match parse_set_file(&run.read(p)?)? {
            AnySet::Line(s) => Some(s),
            AnySet::Space(_) => bail!("start set must be 1-dimensional"),
        },
        None => None,
    };
    let result = if args.weak {
        let start = match start {
            Some(s) => s,
            None if ifs.maps().iter().all(|m| m.is_affine_like()) => CompactSet1D::unit_interval(),
            None => CompactSet1D::points(vec![Scalar::zero(), Scalar::one().half(), Scalar::one()])?,
        };
        iterate_weak(&ifs, start, args.tol, args.max_iter)?
    } else {
        if !ifs.is_strict() {
            bail!("IFS is not strict (some Lipschitz constant >= 1); rerun with --weak");
        }
        solve_attractor(&ifs, args.tol, start)?
    };
    let ok = result.converged;
    let report = AttractorReport::from(result);
    if let Some(out) = args.out {
        write_json(out, &report)?;
    }
    let details = json!({
        "iterations": report.iterations,
        "converged": report.converged,
        "stalled": report.stalled,
        "bound": report.bound.as_ref().map(scalar_json),
        "components": report.attractor.len(),
    });
    Ok(run.finish(ok, args.out, details))
}

pub fn cmd_hausdorff(a: &Path, b: &Path) -> Result<RunReport> {
    let mut run = Run::new("hausdorff");
    let sa = parse_set_file(&run.read(a)?)?;
    let sb = parse_set_file(&run.read(b)?)?;
    let details = match (&sa, &sb) {
        (AnySet::Line(x), AnySet::Line(y)) => scalar_json(&hausdorff_distance(x, y)),
        (AnySet::Space(x), AnySet::Space(y)) => {
            let d = hausdorff_distance_d(x, y)?;
            json!({
                "exact": d.exact().map(|s| s.to_fraction_string())
                    .unwrap_or_else(|| format!("sqrt({})", d.squared.to_fraction_string())),
                "squared": d.squared.to_fraction_string(),
                "decimal": d.to_f64(),
            })
        }
        _ => bail!("sets have different dimensions"),
    };
    Ok(run.finish(true, None, details))
}

pub fn cmd_code_expand(code: &Path, depth: usize, out: Option<&Path>) -> Result<RunReport> {
    let mut run = Run::new("code-expand");
    let code: Code = serde_json::from_str(&run.read(code)?).context("parsing code file")?;
    // code files are finite prefixes; deeper levels are zero
    let set = expand(&code.resized(depth.max(code.depth())), depth)?;
    if let Some(out) = out {
        write_json(out, &set)?;
    }
    let details = json!({ "depth": depth, "intervals": set.len(), "measure": scalar_json(&set.measure()) });
    Ok(run.finish(true, out, details))
}

pub struct Thm41Args<'a> {
    pub code: &'a Path,
    pub k: usize,
    pub seed: u64,
    pub trials: usize,
    pub depth: Option<usize>,
    pub perturb: bool,
    /// Explicit `Y` instead of sampled ones.
    pub y: Option<&'a Path>,
    pub out: Option<&'a Path>,
}

pub fn trial_file_name(t: usize) -> String {
    format!("trial-{t:04}.json")
}

pub fn cmd_thm41(args: &Thm41Args) -> Result<RunReport> {
    let mut run = Run::new("thm41");
    let code: Code = serde_json::from_str(&run.read(args.code)?).context("parsing code file")?;
    let (n, eps) = epsilon_for_k(args.k)?;
    let certs: Vec<Thm41Certificate> = match args.y {
        Some(p) => {
            let y = match parse_set_file(&run.read(p)?)? {
                AnySet::Line(s) => s,
                AnySet::Space(_) => bail!("Y must be 1-dimensional"),
            };
            vec![thm41_witness_search(&code, args.k, &y, args.depth)?]
        }
        None => {
            let cfg = Thm41TrialConfig {
                k: args.k,
                seed: args.seed,
                trials: args.trials,
                depth: args.depth,
                sample: SampleParams { perturb: args.perturb, ..SampleParams::default() },
            };
            run_thm41_trials(&code, &cfg)?.0
        }
    };
    let summary = summarize(&certs);
    if let Some(dir) = args.out {
        fs::create_dir_all(dir)?;
        for (t, c) in certs.iter().enumerate() {
            write_json(&dir.join(trial_file_name(t)), &Certificate::Thm41(c.clone()))?;
        }
        write_json(&dir.join("summary.json"), &summary)?;
    }
    let failed: Vec<usize> = certs.iter().enumerate().filter(|(_, c)| !c.success).map(|(t, _)| t).collect();
    let details = json!({
        "k": args.k,
        "n": n,
        "epsilon": scalar_json(&eps),
        "trials": summary.trials,
        "passed": summary.passed,
        "failed_trials": failed,
        "min_margin": summary.min_margin.as_ref().map(scalar_json),
        "mean_margin": summary.mean_margin.as_ref().map(scalar_json),
    });
    Ok(run.finish(failed.is_empty(), args.out, details))
}

pub fn cmd_prop32(annuli: usize, ratio: &Scalar, params: CountingParams, out: Option<&Path>) -> Result<RunReport> {
    let run = Run::new("prop32");
    let cert = Prop32Certificate::build(annuli, ratio, params)?;
    let ok = cert.holds();
    let details = json!({
        "counts": cert.construction.counts,
        "points": cert.construction.points.len(),
        "t": cert.construction.t.iter().map(Scalar::to_fraction_string).collect::<Vec<_>>(),
        "conditions": cert.construction.conditions,
        "counting": cert.counting,
    });
    if let Some(out) = out {
        write_json(out, &Certificate::Prop32(cert))?;
    }
    Ok(run.finish(ok, out, details))
}

pub struct Prop33Args<'a> {
    pub set: &'a Path,
    pub x: &'a [Scalar],
    pub count: usize,
    pub radius: Option<Scalar>,
    pub attempts: usize,
    pub seed: u64,
    pub out: Option<&'a Path>,
}

pub fn cmd_prop33(args: &Prop33Args) -> Result<RunReport> {
    let mut run = Run::new("prop33");
    let f: CompactSetD = match parse_set_file(&run.read(args.set)?)? {
        AnySet::Space(s) => s,
        AnySet::Line(s) => hyperfrac_core::hyperspace::embed(&s, 1, None)?,
    };
    let cert = Prop33Certificate::build(&f, args.x, args.count, args.radius.clone(), args.attempts, args.seed)?;
    let ok = cert.holds();
    let details = json!({
        "axis": cert.witness.axis,
        "radii": cert.witness.steps.iter().map(|s| s.radius.to_fraction_string()).collect::<Vec<_>>(),
        "balls_disjoint": cert.witness.steps.iter().all(|s| s.balls_disjoint),
        "ratio_is_one": cert.witness.steps.iter().all(|s| s.ratio_is_one),
        "counterexamples": cert.falsification.iter().map(|r| r.counterexamples).sum::<usize>(),
        "attempts_per_step": args.attempts,
    });
    if let Some(out) = args.out {
        write_json(out, &Certificate::Prop33(cert))?;
    }
    Ok(run.finish(ok, args.out, details))
}

/// Certificate files under `path`: the file itself, or every `*.json` in
/// the directory except `summary.json`, sorted by name.
pub fn certificate_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "summary.json"))
            .collect();
        files.sort();
        Ok(files)
    } else {
        Ok(vec![path.to_path_buf()])
    }
}

pub fn cmd_verify(path: &Path) -> Result<RunReport> {
    let mut run = Run::new("verify");
    let files = certificate_files(path)?;
    if files.is_empty() {
        bail!("no certificate files under {}", path.display());
    }
    let mut results = Vec::with_capacity(files.len());
    let mut ok = true;
    for f in &files {
        let text = run.read(f)?;
        let cert: Certificate = serde_json::from_str(&text).with_context(|| format!("parsing {}", f.display()))?;
        let rep: ReplayReport = replay(&cert)?;
        ok &= rep.passed();
        results.push(json!({
            "file": f.display().to_string(),
            "kind": rep.kind,
            "matches": rep.matches,
            "checks_hold": rep.checks_hold,
            "first_difference": rep.first_difference,
        }));
    }
    let first_failure = results.iter().find(|r| r["matches"] != json!(true) || r["checks_hold"] != json!(true)).cloned();
    let details = json!({ "certificates": results.len(), "first_failure": first_failure, "results": results });
    Ok(run.finish(ok, Some(path), details))
}

pub fn cmd_render(input: &Path, depth: Option<usize>, out: &Path) -> Result<RunReport> {
    let mut run = Run::new("render");
    let text = run.read(input)?;
    let value: Value = serde_json::from_str(&text)?;
    let svg = if value.get("kind").and_then(Value::as_str).is_some_and(|k| k == "points" || k == "intervals") {
        render::render_set(&parse_set_file(&text)?)?
    } else if value.get("kind").is_some() {
        let cert: Certificate = serde_json::from_value(value)?;
        render::render_certificate(&cert)?
    } else if value.get("entries").is_some() {
        let code: Code = serde_json::from_value(value)?;
        let depth = depth.unwrap_or(code.depth());
        render::render_code(&code.resized(depth.max(code.depth())), depth)?
    } else if value.get("maps").is_some() {
        let ifs: Ifs = serde_json::from_value(value)?;
        render::render_ifs(&ifs, depth.unwrap_or(5))?
    } else {
        bail!("{} is not a set, code, IFS or certificate file", input.display());
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, &svg)?;
    let details = json!({ "bytes": svg.len() });
    Ok(run.finish(true, Some(out), details))
}

/// Applies [`WORKERS_ENV`] to the global thread pool.
pub fn configure_workers() -> Result<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v} is not a count"))?;
        if n == 0 {
            bail!("{WORKERS_ENV} must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
