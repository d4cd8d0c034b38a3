//! Command-line surface of the PMD toolkit.
//!
//! Every subcommand prints a human-readable report to standard output and,
//! when `--json` / `--csv` paths are given, writes machine-readable reports
//! that embed a [`RunManifest`]. Exit codes: [`EXIT_OK`] on success,
//! [`EXIT_INVARIANT`] when a proved identity or bound fails (an implementation
//! bug), [`EXIT_USAGE`] on bad arguments or unreadable input.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use pmd_core::finite_field::is_prime;
use pmd_core::metrics::{
    average_overlap, bergamaschi_gap, corollary1_bound, design_average_check, theorem1_bound, GapReport, IDENTITY_TOL,
};
use pmd_core::search::{optimize_epsilon, restart_seed};
use pmd_core::{
    CodeSpace, CodeSpaceError, DenseOperator, DesignCheckReport, FieldCtx, FieldError, Limits, MetricsError,
    PauliError, PauliSpace, PmdReport, SearchConfig, SearchError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "pmd",
    version,
    about = "Verify, search and bound Pauli manipulation detection codes"
)]
pub struct Cli {
    /// Also record wall time inside JSON manifests (makes them run-dependent).
    #[arg(long, global = true)]
    pub record_time: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lower bound on epsilon for given (n, lambda, q), and the minimal
    /// redundancy for a target epsilon.
    Bound(BoundArgs),
    /// Evaluate epsilon of a code-space file.
    Verify(VerifyArgs),
    /// Check the 1-design and average-overlap identities on random inputs.
    DesignCheck(DesignCheckArgs),
    /// Multi-restart local search for low-epsilon codes.
    Search(SearchArgs),
    /// Compare a purity-testing construction with the redundancy lower bound.
    Gap(GapArgs),
}

/// Alphabet size, either as `-q p^m` or as `-p p [-m m]`.
#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Alphabet size q (must be a prime power).
    #[arg(short = 'q', long = "q", conflicts_with_all = ["p", "m"])]
    pub q: Option<u64>,
    /// Field characteristic p.
    #[arg(short = 'p', long = "p")]
    pub p: Option<u64>,
    /// Extension degree m (default 1).
    #[arg(short = 'm', long = "m", requires = "p")]
    pub m: Option<usize>,
}

impl FieldArgs {
    /// Resolves to `(p, m)`.
    pub fn resolve(&self) -> Result<(u64, usize), CliError> {
        match (self.q, self.p) {
            (Some(q), _) => {
                split_prime_power(q).ok_or_else(|| CliError::usage(format!("q = {q} is not a prime power")))
            }
            (None, Some(p)) => {
                let m = self.m.unwrap_or(1);
                if !is_prime(p) {
                    return Err(CliError::usage(format!("p = {p} is not prime")));
                }
                if m == 0 {
                    return Err(CliError::usage("m must be at least 1"));
                }
                Ok((p, m))
            }
            (None, None) => Err(CliError::usage("the alphabet is required: pass -q or -p [-m]")),
        }
    }

    fn q(&self) -> Result<u64, CliError> {
        let (p, m) = self.resolve()?;
        u32::try_from(m)
            .ok()
            .and_then(|m| p.checked_pow(m))
            .ok_or_else(|| CliError::usage("q overflows"))
    }
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Number of qudits.
    #[arg(short = 'n')]
    pub n: Option<u32>,
    /// Redundancy lambda = n - k.
    #[arg(short = 'l', long = "lambda")]
    pub lambda: Option<u32>,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Target epsilon; prints the minimal redundancy.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Code-space file.
    pub codefile: PathBuf,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Worker threads (does not change results).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DesignCheckArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Number of qudits.
    #[arg(short = 'n')]
    pub n: usize,
    /// Random operators, and random codes per k.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Number of qudits.
    #[arg(short = 'n')]
    pub n: usize,
    /// Logical qudits.
    #[arg(short = 'k')]
    pub k: usize,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Local steps per restart.
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub initial_step: f64,
    #[arg(long, default_value_t = 0.7)]
    pub step_decay: f64,
    /// Stop once epsilon is within 1e-6 of this value.
    #[arg(long)]
    pub target: Option<f64>,
    /// Trajectory CSV (iteration, epsilon).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the best code space as a code-space file.
    #[arg(long)]
    pub save_code: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    /// Number of qudits.
    #[arg(short = 'n')]
    pub n: u32,
    /// Security parameter of the purity-testing construction.
    #[arg(short = 'l', long = "ell")]
    pub ell: u32,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Provenance embedded in every machine-readable report.
///
/// `params` holds every flag that can influence the result; worker counts
/// and output paths are excluded from it so reports compare byte-for-byte
/// across runs. Wall time is only serialized under `--record-time`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, params: Value, seed: Option<u64>, outputs: &[&Option<PathBuf>]) -> Self {
        RunManifest {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: None,
            outputs: outputs
                .iter()
                .filter_map(|p| p.as_ref().map(|p| p.display().to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVARIANT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<PauliError> for CliError {
    fn from(e: PauliError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<CodeSpaceError> for CliError {
    fn from(e: CodeSpaceError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            // a numerical failure is not the caller's fault
            MetricsError::Linalg(_) => CliError::invariant(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BoundViolated { .. } => CliError::invariant(e.to_string()),
            SearchError::Metrics(m) => m.into(),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// `q = p^m` with `p` prime, or `None`.
pub fn split_prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..)
        .take_while(|d: &u64| d.saturating_mul(*d) <= q)
        .find(|d| q.is_multiple_of(*d))
        .unwrap_or(q);
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let limits = Limits::from_env();
    match execute(&cli, &limits, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}

pub fn execute(cli: &Cli, limits: &Limits, out: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = Ctx {
        record_time: cli.record_time,
        start: Instant::now(),
    };
    match &cli.command {
        Command::Bound(a) => cmd_bound(a, &ctx, out),
        Command::Verify(a) => cmd_verify(a, &ctx, limits, out),
        Command::DesignCheck(a) => cmd_design_check(a, &ctx, limits, out),
        Command::Search(a) => cmd_search(a, &ctx, limits, out),
        Command::Gap(a) => cmd_gap(a, &ctx, out),
    }
}

struct Ctx {
    record_time: bool,
    start: Instant,
}

impl Ctx {
    fn finish(&self, manifest: &mut RunManifest, out: &mut dyn Write) -> Result<(), CliError> {
        let elapsed = self.start.elapsed().as_secs_f64();
        writeln!(out, "wall time: {elapsed:.3} s")?;
        if self.record_time {
            manifest.wall_time_s = Some(elapsed);
        }
        Ok(())
    }
}

fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::usage("--workers must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::usage(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn write_json(path: &Option<PathBuf>, value: &Value) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn cmd_bound(a: &BoundArgs, ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let q = a.field.q()?;
    let mut result = json!({});
    match (a.n, a.lambda) {
        (Some(n), Some(lambda)) => {
            let b = theorem1_bound(n, lambda, q)?;
            writeln!(out, "theorem1_bound(n={n}, lambda={lambda}, q={q}) = {b}")?;
            result["theorem1_bound"] = json!(b);
        }
        (None, None) if a.epsilon.is_some() => {}
        _ => return Err(CliError::usage("bound needs both -n and -l, or --epsilon")),
    }
    if let Some(eps) = a.epsilon {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(CliError::usage(format!("--epsilon {eps} must lie in (0, 1]")));
        }
        let l = corollary1_bound(eps, q)?;
        writeln!(out, "lambda_min(epsilon={eps}, q={q}) = {l}")?;
        result["corollary1_lambda_min"] = json!(l);
    }
    let params = json!({"n": a.n, "lambda": a.lambda, "q": q, "epsilon": a.epsilon});
    let mut manifest = RunManifest::new("bound", params, None, &[&a.json]);
    ctx.finish(&mut manifest, out)?;
    result["manifest"] = to_value(&manifest);
    write_json(&a.json, &result)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, ctx: &Ctx, limits: &Limits, out: &mut dyn Write) -> Result<i32, CliError> {
    let cs = CodeSpace::load_path(&a.codefile)?;
    let (report, _) = with_workers(a.workers, || PmdReport::evaluate(&cs, limits))??;
    writeln!(
        out,
        "code: n={} k={} q={} lambda={}",
        report.n, report.k, report.q, report.lambda
    )?;
    writeln!(out, "epsilon = {}", report.epsilon)?;
    writeln!(out, "worst label: {}", report.worst_label)?;
    writeln!(out, "theorem1 bound = {}", report.bound_theorem1)?;
    writeln!(out, "slack = {}", report.slack)?;
    writeln!(out, "corollary lambda_min = {}", report.corollary_lambda_min)?;
    writeln!(out, "epsilon >= q^-n: {}", report.eps_floor_ok)?;

    let params = json!({"codefile": a.codefile.display().to_string()});
    let mut manifest = RunManifest::new("verify", params, None, &[&a.json, &a.csv]);
    ctx.finish(&mut manifest, out)?;
    write_json(&a.json, &json!({"manifest": manifest, "report": report}))?;
    if let Some(path) = &a.csv {
        write_file(path, &format!("{}\n{}\n", PmdReport::CSV_HEADER, report.csv_row()))?;
    }
    if !report.respects_bound() {
        return Err(CliError::invariant(format!(
            "epsilon {} is below the lower bound {} (slack {})",
            report.epsilon, report.bound_theorem1, report.slack
        )));
    }
    if !report.eps_floor_ok {
        return Err(CliError::invariant(format!("epsilon {} is below q^-n", report.epsilon)));
    }
    Ok(EXIT_OK)
}

/// Seed of trial `t` in group `group` (0 for operators, `k + 1` for codes).
fn trial_seed(seed: u64, group: usize, t: usize) -> u64 {
    restart_seed(restart_seed(seed, group), t)
}

#[derive(Clone, Debug, Serialize)]
struct OverlapRow {
    k: usize,
    lambda: usize,
    expected: f64,
    max_value_error: f64,
    max_deviation: f64,
}

fn cmd_design_check(a: &DesignCheckArgs, ctx: &Ctx, limits: &Limits, out: &mut dyn Write) -> Result<i32, CliError> {
    let (p, m) = a.field.resolve()?;
    if a.n == 0 {
        return Err(CliError::usage("n must be at least 1"));
    }
    let field = FieldCtx::new(p, m)?;
    let space = PauliSpace::new(&field, a.n)?;
    limits.check_dense(space.dim() as u64)?;
    limits.check_labels(space.num_labels() as u128)?;

    let (report, rows) = with_workers(a.workers, || design_check(a, &field, &space, limits))??;
    if a.trials == 0 {
        writeln!(out, "no trials requested")?;
    } else {
        writeln!(out, "1-design max deviation = {}", report.moment_deviation)?;
        for r in &rows {
            writeln!(
                out,
                "k={} lambda={} expected q^-lambda = {}: max |value - expected| = {}, max operator deviation = {}",
                r.k, r.lambda, r.expected, r.max_value_error, r.max_deviation
            )?;
        }
        writeln!(out, "average-overlap max deviation = {}", report.overlap_deviation)?;
    }

    let params = json!({"p": p, "m": m, "n": a.n, "trials": a.trials});
    let mut manifest = RunManifest::new("design-check", params, Some(a.seed), &[&a.json, &a.csv]);
    ctx.finish(&mut manifest, out)?;
    write_json(&a.json, &json!({"manifest": manifest, "report": report, "per_k": rows}))?;
    if let Some(path) = &a.csv {
        write_file(
            path,
            &format!("{}\n{}\n", DesignCheckReport::CSV_HEADER, report.csv_row()),
        )?;
    }
    if report.moment_deviation > IDENTITY_TOL || report.overlap_deviation > IDENTITY_TOL {
        return Err(CliError::invariant(format!(
            "identity deviation above {IDENTITY_TOL}: moment {}, overlap {}",
            report.moment_deviation, report.overlap_deviation
        )));
    }
    Ok(EXIT_OK)
}

/// `overlap_value` is the measured `‖A‖∞` of the code with the largest
/// overlap deviation.
fn design_check(
    a: &DesignCheckArgs,
    field: &FieldCtx,
    space: &PauliSpace,
    limits: &Limits,
) -> Result<(DesignCheckReport, Vec<OverlapRow>), CliError> {
    let mut report = DesignCheckReport::default();
    let mut rows = Vec::new();
    if a.trials == 0 {
        return Ok((report, rows));
    }
    for t in 0..a.trials {
        let o = DenseOperator::random_gaussian(space.dim(), trial_seed(a.seed, 0, t));
        report.moment_deviation = report.moment_deviation.max(design_average_check(space, &o, limits)?);
    }
    let q = field.q() as f64;
    for k in 0..=a.n {
        let lambda = a.n - k;
        let expected = q.powi(-(lambda as i32));
        let mut row = OverlapRow {
            k,
            lambda,
            expected,
            max_value_error: 0.0,
            max_deviation: 0.0,
        };
        for t in 0..a.trials {
            let cs = CodeSpace::random(field, a.n, k, trial_seed(a.seed, k + 1, t))?;
            let (value, deviation) = average_overlap(&cs, limits)?;
            let worst = deviation.max((value - expected).abs());
            if worst > report.overlap_deviation || (k == 0 && t == 0) {
                report.overlap_value = value;
            }
            report.overlap_deviation = report.overlap_deviation.max(worst);
            row.max_value_error = row.max_value_error.max((value - expected).abs());
            row.max_deviation = row.max_deviation.max(deviation);
        }
        rows.push(row);
    }
    Ok((report, rows))
}

fn cmd_search(a: &SearchArgs, ctx: &Ctx, limits: &Limits, out: &mut dyn Write) -> Result<i32, CliError> {
    let (p, m) = a.field.resolve()?;
    let cfg = SearchConfig {
        seed: a.seed,
        restarts: a.restarts,
        local_steps: a.steps,
        initial_step: a.initial_step,
        step_decay: a.step_decay,
        target: a.target,
        ..SearchConfig::new(a.n, a.k, p, m)
    };
    let result = with_workers(a.workers, || optimize_epsilon(&cfg, limits))??;
    let r = &result.report;
    writeln!(out, "search: n={} k={} q={} lambda={}", r.n, r.k, r.q, r.lambda)?;
    writeln!(out, "best epsilon = {}", r.epsilon)?;
    writeln!(out, "worst label: {}", r.worst_label)?;
    writeln!(out, "theorem1 bound = {}", r.bound_theorem1)?;
    writeln!(out, "slack = {}", r.slack)?;
    writeln!(out, "trajectory points: {}", result.trajectory.len())?;

    let params = json!({
        "n": a.n, "k": a.k, "p": p, "m": m,
        "restarts": a.restarts, "steps": a.steps,
        "initial_step": a.initial_step, "step_decay": a.step_decay,
        "rejection_streak": cfg.rejection_streak, "target": a.target,
    });
    let mut manifest = RunManifest::new("search", params, Some(a.seed), &[&a.json, &a.csv, &a.save_code]);
    ctx.finish(&mut manifest, out)?;
    let trajectory: Vec<Value> = result
        .trajectory
        .iter()
        .map(|(it, eps)| json!({"iteration": it, "epsilon": eps}))
        .collect();
    write_json(
        &a.json,
        &json!({"manifest": manifest, "report": result.report, "trajectory": trajectory}),
    )?;
    if let Some(path) = &a.csv {
        write_file(path, &result.trajectory_csv())?;
    }
    if let Some(path) = &a.save_code {
        result.best.save_path(path)?;
    }
    Ok(EXIT_OK)
}

fn cmd_gap(a: &GapArgs, ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let q = a.field.q()?;
    let g: GapReport = bergamaschi_gap(a.n, a.ell, q)?;
    writeln!(out, "n={} ell={} q={}", g.n, g.ell, g.q)?;
    writeln!(out, "lambda_construction = {}", g.lambda_construction)?;
    writeln!(out, "epsilon_upper = {}", g.epsilon_upper)?;
    writeln!(out, "lambda_lower = {}", g.lambda_lower)?;
    writeln!(out, "gap = {} (ell + {})", g.gap, g.excess_over_ell)?;
    if g.out_of_regime {
        writeln!(
            out,
            "note: epsilon_upper >= 1, ell is too small for this n (out of regime)"
        )?;
    }
    let params = json!({"n": a.n, "ell": a.ell, "q": q});
    let mut manifest = RunManifest::new("gap", params, None, &[&a.json]);
    ctx.finish(&mut manifest, out)?;
    write_json(&a.json, &json!({"manifest": manifest, "report": g}))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("pmd").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn prime_powers() {
        assert_eq!(split_prime_power(2), Some((2, 1)));
        assert_eq!(split_prime_power(8), Some((2, 3)));
        assert_eq!(split_prime_power(9), Some((3, 2)));
        assert_eq!(split_prime_power(49), Some((7, 2)));
        assert_eq!(split_prime_power(97), Some((97, 1)));
        assert_eq!(split_prime_power(6), None);
        assert_eq!(split_prime_power(12), None);
        assert_eq!(split_prime_power(1), None);
        assert_eq!(split_prime_power(0), None);
    }

    #[test]
    fn field_args_resolve() {
        let f = |q, p, m| FieldArgs { q, p, m }.resolve();
        assert_eq!(f(Some(4), None, None), Ok((2, 2)));
        assert_eq!(f(None, Some(3), None), Ok((3, 1)));
        assert_eq!(f(None, Some(3), Some(2)), Ok((3, 2)));
        assert_eq!(f(None, Some(4), None).unwrap_err().code, EXIT_USAGE);
        assert_eq!(f(None, None, None).unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn bound_examples() {
        let (code, out, _) = run_str(&["bound", "-n", "1", "-l", "1", "-q", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("= 0.57735026918962"), "{out}");
        let (code, out, _) = run_str(&["bound", "-n", "3", "-l", "0", "-q", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains(") = 1\n"), "{out}");
        let (code, out, _) = run_str(&["bound", "-q", "2", "--epsilon", "0.5"]);
        assert_eq!(code, 0);
        assert!(out.contains(") = 1\n"), "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        for args in [
            vec!["bound", "-n", "1", "-q", "2"],
            vec!["bound", "-n", "1", "-l", "1", "-q", "6"],
            vec!["bound", "-n", "1", "-l", "2", "-q", "2"],
            vec!["bound", "-n", "1", "-l", "1", "-q", "2", "--frobnicate"],
            vec!["gap", "-n", "10", "-l", "2"],
            vec!["nonsense"],
            vec!["design-check", "-p", "2", "-n", "0"],
            vec!["search", "-n", "1", "-k", "2", "-q", "2"],
            vec!["search", "-n", "1", "-k", "0", "-q", "2", "--restarts", "0"],
            vec!["search", "-n", "1", "-k", "0", "-q", "2", "--step-decay", "1.5"],
            vec!["verify", "/nonexistent/code.json"],
        ] {
            let (code, _, err) = run_str(&args);
            assert_eq!(code, EXIT_USAGE, "{args:?}");
            assert!(!err.is_empty(), "{args:?}");
        }
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }

    #[test]
    fn gap_flags_out_of_regime() {
        let (code, out, _) = run_str(&["gap", "-n", "10", "-l", "2", "-q", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("out of regime"));
        let (code, out, _) = run_str(&["gap", "-n", "10", "-l", "10", "-q", "2"]);
        assert_eq!(code, 0);
        assert!(!out.contains("out of regime"));
        assert!(out.contains("gap = 15.39231742277"), "{out}");
    }

    #[test]
    fn design_check_zero_trials_is_noop() {
        let (code, out, _) = run_str(&["design-check", "-p", "2", "-n", "1", "--trials", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("no trials"));
    }

    #[test]
    fn workers_zero_rejected() {
        let (code, _, err) = run_str(&["search", "-n", "1", "-k", "1", "-q", "2", "--workers", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("workers"));
    }

    #[test]
    fn manifest_excludes_time_by_default() {
        let m = RunManifest::new("x", json!({}), None, &[]);
        let text = serde_json::to_string(&m).unwrap();
        assert!(!text.contains("wall_time"));
    }
}
