//! `pmax`: moments, distribution grids, hitting-time densities, Airy zero tables and
//! validation suites for the maximum of Brownian motion with parabolic drift.

mod output;
mod validate;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{csv_records, csv_table, emit, json_document, num, RunManifest};
use parabolic_max::airy::shared_zero_table;
use parabolic_max::mc::{summarize, McConfig, McSummary};
use parabolic_max::series::{
    eval_point, moments, moments_by_quadrature, HittingKernel, MomentSet, SeriesConfig, TailMode, MIN_ASYMPTOTIC_TERMS,
};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use validate::SuiteReport;

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CHECK: u8 = 3;

/// Environment variable holding the default worker thread count.
const THREADS_ENV: &str = "PMAX_THREADS";

#[derive(Parser, Debug)]
#[command(name = "pmax", version, about = "Maximum of Brownian motion with parabolic drift")]
struct Cli {
    /// Write output to FILE (plus FILE.manifest.json) instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First two moments of N and M.
    Moments(MomentsArgs),
    /// CDF or density of N or M on a grid.
    Dist(DistArgs),
    /// Density of the first hitting time of x.
    Hitting(HittingArgs),
    /// Zeros of Ai with the quantities the series use there.
    Zeros(ZerosArgs),
    /// Run self-consistency suites; exits 3 on any failure.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct SeriesArgs {
    /// Series cutoff K.
    #[arg(long, default_value_t = MIN_ASYMPTOTIC_TERMS)]
    terms: usize,
    /// Tail treatment beyond the cutoff; defaults to asymptotic when K allows it.
    #[arg(long, value_enum)]
    tail: Option<TailArg>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum TailArg {
    None,
    Asymptotic,
}

impl SeriesArgs {
    fn config(&self) -> SeriesConfig {
        let tail_mode = match self.tail {
            Some(TailArg::None) => TailMode::None,
            Some(TailArg::Asymptotic) => TailMode::Asymptotic,
            None if self.terms >= MIN_ASYMPTOTIC_TERMS => TailMode::Asymptotic,
            None => TailMode::None,
        };
        SeriesConfig { terms: self.terms, tail_mode, ..SeriesConfig::default() }
    }
}

#[derive(Args, Debug, Clone)]
struct McArgs {
    /// Monte Carlo sample count (pairs); accepts forms like 1e6.
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    paths: u64,
    /// Grid step.
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
    /// Simulation horizon.
    #[arg(long, default_value_t = 4.0)]
    horizon: f64,
    #[arg(long, default_value_t = McConfig::default().seed)]
    seed: u64,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig { horizon: self.horizon, step: self.step, paths: self.paths, seed: self.seed, antithetic: false }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Series,
    Integral,
    Mc,
    All,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[arg(long, value_enum, default_value_t = Route::Series)]
    route: Route,
    #[command(flatten)]
    series: SeriesArgs,
    #[command(flatten)]
    mc: McArgs,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum What {
    Cdf,
    Pdf,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Dist {
    #[value(name = "N")]
    N,
    #[value(name = "M")]
    M,
}

/// `a:b:n`, n equally spaced points from a to b inclusive.
#[derive(Debug, Clone, Copy, serde::Serialize)]
struct Grid {
    start: f64,
    end: f64,
    points: usize,
}

impl Grid {
    fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.end } else { self.start + step * i as f64 }).collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected a:b:n, got {s:?}"));
    };
    let start: f64 = a.trim().parse().map_err(|e| format!("grid start: {e}"))?;
    let end: f64 = b.trim().parse().map_err(|e| format!("grid end: {e}"))?;
    let points: usize = n.trim().parse().map_err(|e| format!("grid count: {e}"))?;
    if !(start.is_finite() && end.is_finite()) || points == 0 || (points > 1 && end <= start) {
        return Err(format!("grid {s:?} needs finite a < b and n >= 1"));
    }
    Ok(Grid { start, end, points })
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

#[derive(Args, Debug)]
#[group(id = "points", required = true, args = ["grid", "x"])]
struct PointArgs {
    /// Evaluation grid a:b:n.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    /// Single evaluation point.
    #[arg(long)]
    x: Option<f64>,
}

impl PointArgs {
    fn values(&self) -> Vec<f64> {
        match (self.grid, self.x) {
            (Some(g), _) => g.values(),
            (None, Some(x)) => vec![x],
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Args, Debug)]
struct DistArgs {
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, value_enum)]
    dist: Dist,
    #[command(flatten)]
    points: PointArgs,
    #[command(flatten)]
    series: SeriesArgs,
}

#[derive(Args, Debug)]
struct HittingArgs {
    /// Level to hit.
    #[arg(long)]
    x: f64,
    /// Time grid a:b:n.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[command(flatten)]
    series: SeriesArgs,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    /// Number of zeros.
    #[arg(long, default_value_t = 20)]
    count: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SuiteName {
    Airy,
    Identities,
    Series,
    Mc,
    All,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = SuiteName::All)]
    suite: SuiteName,
    #[command(flatten)]
    series: SeriesArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    json: bool,
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Usage(String),
    Io(std::io::Error),
    /// Output was produced but a consistency check failed.
    Check,
}

impl From<parabolic_max::Error> for Failure {
    fn from(e: parabolic_max::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Moments(a) => cmd_moments(a, out),
        Command::Dist(a) => cmd_dist(a, out),
        Command::Hitting(a) => cmd_hitting(a, out),
        Command::Zeros(a) => cmd_zeros(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Check) => ExitCode::from(EXIT_CHECK),
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn series_json(cfg: &SeriesConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

const MOMENT_NAMES: [&str; 6] = ["E N", "E M", "E N^2", "E M^2", "Var N", "Var M"];
const MOMENT_KEYS: [&str; 6] = ["en", "em", "en2", "em2", "var_n", "var_m"];

/// Six values with their error estimates, in [`MOMENT_NAMES`] order.
#[derive(Debug, Clone, Copy)]
struct Row {
    value: [f64; 6],
    err: [f64; 6],
}

impl From<&MomentSet<f64>> for Row {
    fn from(m: &MomentSet<f64>) -> Self {
        let e = &m.err_est;
        Row { value: [m.en, m.em, m.en2, m.em2, m.var_n, m.var_m], err: [e.en, e.em, e.en2, e.em2, e.var_n, e.var_m] }
    }
}

impl From<&McSummary> for Row {
    fn from(s: &McSummary) -> Self {
        let est = [s.en, s.em, s.en2, s.em2, s.var_n, s.var_m];
        Row { value: est.map(|e| e.mean), err: est.map(|e| e.stderr) }
    }
}

/// Monte Carlo estimates further than this many standard errors from the series fail `--route all`.
const MC_Z_BOUND: f64 = 4.0;
/// Deterministic routes must agree to this plus their own error estimates.
const ROUTE_TOL: f64 = 1e-9;

fn cmd_moments(a: &MomentsArgs, out: Option<&std::path::Path>) -> CmdResult {
    let started = Instant::now();
    let cfg = a.series.config();
    cfg.validate()?;
    let want = |r: Route| a.route == r || a.route == Route::All;
    let mut routes: Vec<(&str, Row)> = Vec::new();
    let mut mc_cfg = None;
    if want(Route::Series) {
        routes.push(("series", Row::from(&moments::<f64>(&cfg)?)));
    }
    if want(Route::Integral) {
        routes.push(("integral", Row::from(&moments_by_quadrature::<f64>(&cfg)?)));
    }
    if want(Route::Mc) {
        let mc = a.mc.config();
        mc.validate()?;
        routes.push(("mc", Row::from(&summarize(&mc)?)));
        mc_cfg = Some(mc);
    }
    let mut disagreements = Vec::new();
    if a.route == Route::All {
        let base = routes[0].1;
        for (name, row) in &routes[1..] {
            for (i, label) in MOMENT_NAMES.iter().enumerate() {
                let gap = (row.value[i] - base.value[i]).abs();
                let tol = if *name == "mc" { MC_Z_BOUND * row.err[i] } else { ROUTE_TOL + row.err[i] + base.err[i] };
                if gap.is_nan() || gap > tol {
                    disagreements
                        .push(format!("{label} differs between series and {name} by {gap:.3e} (tolerance {tol:.3e})"));
                }
            }
        }
    }
    let config = json!({ "route": format!("{:?}", a.route).to_lowercase(), "series": series_json(&cfg), "mc": mc_cfg });
    let mut manifest = RunManifest::new("moments", config, started);
    manifest.warnings.extend(disagreements.iter().cloned());
    let text = if a.json {
        let obj: serde_json::Map<String, Value> = routes
            .iter()
            .map(|(name, row)| {
                let fields: serde_json::Map<String, Value> = (0..6)
                    .flat_map(|i| {
                        [
                            (MOMENT_KEYS[i].to_string(), json!(row.value[i])),
                            (format!("{}_err", MOMENT_KEYS[i]), json!(row.err[i])),
                        ]
                    })
                    .collect();
                (name.to_string(), Value::Object(fields))
            })
            .collect();
        json_document(json!({ "routes": obj, "consistent": disagreements.is_empty() }), &manifest)
    } else {
        let mut t = format!("{:<8}", "");
        for (name, _) in &routes {
            t += &format!(" {:>24} {:>9}", name, "err");
        }
        t.push('\n');
        for (i, label) in MOMENT_NAMES.iter().enumerate() {
            t += &format!("{label:<8}");
            for (_, row) in &routes {
                t += &format!(" {:>24} {:>9.2e}", num(row.value[i]), row.err[i]);
            }
            t.push('\n');
        }
        t
    };
    emit(&text, out, &manifest)?;
    for d in &disagreements {
        eprintln!("inconsistent: {d}");
    }
    if disagreements.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_dist(a: &DistArgs, out: Option<&std::path::Path>) -> CmdResult {
    let started = Instant::now();
    let cfg = a.series.config();
    cfg.validate()?;
    let xs = a.points.values();
    if let Some(x) = xs.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Failure::Usage(format!("distribution is supported on x >= 0, got {x}")));
    }
    let column = match (a.what, a.dist) {
        (What::Cdf, Dist::N) => "cdf_n",
        (What::Cdf, Dist::M) => "cdf_m",
        (What::Pdf, Dist::N) => "f_n",
        (What::Pdf, Dist::M) => "f_m",
    };
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let p = eval_point(x, &cfg)?;
        let v = match (a.what, a.dist) {
            (What::Cdf, Dist::N) => p.cdf_n,
            (What::Cdf, Dist::M) => p.cdf_m,
            (What::Pdf, Dist::N) => p.f_n,
            (What::Pdf, Dist::M) => p.f_m,
        };
        rows.push(vec![x, v]);
    }
    let config = json!({
        "what": format!("{:?}", a.what).to_lowercase(),
        "dist": format!("{:?}", a.dist),
        "grid": a.points.grid,
        "x": a.points.x,
        "series": series_json(&cfg),
    });
    let manifest = RunManifest::new("dist", config, started);
    emit(&csv_table(&["x", column], rows)?, out, &manifest)?;
    Ok(())
}

fn cmd_hitting(a: &HittingArgs, out: Option<&std::path::Path>) -> CmdResult {
    let started = Instant::now();
    let cfg = a.series.config();
    cfg.validate()?;
    let kernel = HittingKernel::<f64>::new(a.x, &cfg)?;
    let ts = a.grid.values();
    let mut rows = Vec::with_capacity(ts.len());
    // running integral from 0, resolved cell by cell rather than from the grid values
    let mut cumulative = 0.0;
    let mut prev = 0.0f64;
    for &t in &ts {
        let f = if t > 0.0 { kernel.density(t)? } else { 0.0 };
        if t > prev {
            cumulative += kernel.mass(prev, t)?.value;
            prev = t;
        }
        rows.push(vec![t, f, cumulative]);
    }
    let config = json!({ "x": a.x, "grid": a.grid, "series": series_json(&cfg) });
    let manifest = RunManifest::new("hitting", config, started);
    emit(&csv_table(&["t", "f_tau", "cumulative"], rows)?, out, &manifest)?;
    Ok(())
}

fn cmd_zeros(a: &ZerosArgs, out: Option<&std::path::Path>) -> CmdResult {
    let started = Instant::now();
    if a.count == 0 {
        return Err(Failure::Usage("count must be positive".into()));
    }
    let table = shared_zero_table::<f64>(a.count)?;
    let rows = table.head(a.count).iter().map(|r| {
        let mut row = vec![r.k.to_string()];
        row.extend([r.a, r.aip, r.bi, r.hi, r.phi].map(num));
        row
    });
    let text = csv_records(&["k", "a_k", "aip", "bi", "hi", "phi"], rows)?;
    let manifest = RunManifest::new("zeros", json!({ "count": a.count }), started);
    emit(&text, out, &manifest)?;
    Ok(())
}

fn cmd_validate(a: &ValidateArgs, out: Option<&std::path::Path>) -> CmdResult {
    let started = Instant::now();
    let cfg = a.series.config();
    cfg.validate()?;
    let want = |s: SuiteName| a.suite == s || a.suite == SuiteName::All;
    let mc = a.mc.config();
    if want(SuiteName::Mc) {
        mc.validate()?;
    }
    let mut reports: Vec<SuiteReport> = Vec::new();
    if want(SuiteName::Airy) {
        reports.push(validate::airy()?);
    }
    if want(SuiteName::Identities) {
        reports.push(validate::identities()?);
    }
    if want(SuiteName::Series) {
        reports.push(validate::series(&cfg)?);
    }
    if want(SuiteName::Mc) {
        reports.push(validate::monte_carlo(&mc, &cfg)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let config = json!({
        "suite": format!("{:?}", a.suite).to_lowercase(),
        "series": series_json(&cfg),
        "mc": if want(SuiteName::Mc) { serde_json::to_value(mc).unwrap_or(Value::Null) } else { Value::Null },
    });
    let manifest = RunManifest::new("validate", config, started);
    let text = if a.json {
        json_document(json!({ "pass": pass, "suites": reports }), &manifest)
    } else {
        let mut t = String::new();
        for r in &reports {
            t += &format!("[{}] {}\n", r.suite, if r.pass { "PASS" } else { "FAIL" });
            for c in &r.checks {
                let mark = if c.pass { "ok  " } else { "FAIL" };
                t += &format!("  {mark} {:<52} gap {:.3e} <= {:.3e}\n", c.name, c.gap, c.tolerance);
            }
        }
        t += if pass { "all suites passed\n" } else { "validation failed\n" };
        t
    };
    emit(&text, out, &manifest)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
