//! Command-line front end: `simulate`, `theory`, `compare` and `oracle`.
//!
//! Every command writes its CSV to `--out` (or stdout). Failures print a single
//! `error kind=<kind> code=<code> message="<text>"` line to stderr and exit with 1 for
//! validation errors or 2 for runtime errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::io::{self, RunManifest, Series, SimulatedBlock};
use crate::oracle;
use crate::simulator::{sweep_cluster_sizes, CachingSpec, SimConfig};
use crate::theory::{
    achievable_curve, baseline_throughputs, default_achievable_curve, default_outer_curve,
    outer_bound_curve, CurveGrid, SourceTag, TheoryParams, TradeoffCurve,
};
use crate::topology::admissible_cluster_sizes;
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "d2d-tradeoff", version, about = "Throughput-outage tradeoff of one-hop D2D caching networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimates over a sweep of cluster sizes.
    Simulate(SimulateArgs),
    /// Closed-form achievable curve, outer bound and baselines.
    Theory(TheoryArgs),
    /// Relative error of one curve file against another, plus an SVG plot.
    Compare(CompareArgs),
    /// Brute-force checks of the caching optimum and the small-network simulator.
    Oracle(OracleArgs),
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    /// Flat key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Zipf request exponent; repeat for several curves.
    #[arg(long = "gamma-r")]
    pub gamma_r: Vec<f64>,
    /// Cluster size; repeat for a sweep.
    #[arg(long = "g-c")]
    pub g_c: Vec<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Reuse factor override.
    #[arg(long = "K")]
    pub reuse: Option<usize>,
    /// Link rate in bit/s/Hz.
    #[arg(long = "C")]
    pub rate: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed (required, here or in the config file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// optimal, uniform or zipf:<gamma_c>.
    #[arg(long)]
    pub caching: Option<String>,
    #[arg(long = "allow-self-hit")]
    pub allow_self_hit: bool,
    /// Worker threads (0 = all cores). Does not affect results.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a run manifest here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TheoryArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "gamma-r")]
    pub gamma_r: Vec<f64>,
    /// Evaluate achievable case 2 at these cluster sizes instead of the default grids.
    #[arg(long = "g-c")]
    pub g_c: Vec<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "K")]
    pub reuse: Option<f64>,
    #[arg(long = "C")]
    pub rate: Option<f64>,
    #[arg(long)]
    pub rho1: Option<f64>,
    #[arg(long)]
    pub rho2: Option<f64>,
    #[arg(long)]
    pub rho3: Option<f64>,
    /// Comma-separated outage grid for both curves; an empty string yields no points.
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    /// Points per case on the default grids.
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    /// Emit baseline rows even when an explicit grid is given.
    #[arg(long)]
    pub baselines: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Left curves, usually `simulate` output.
    pub left: PathBuf,
    /// Right curves, usually `theory` output.
    pub right: PathBuf,
    /// Right-hand source to match when the left source is absent on the right.
    #[arg(long, default_value = "achievable")]
    pub against: String,
    /// Link rate used to normalize simulated throughput.
    #[arg(long = "C", default_value_t = 1.0)]
    pub rate: f64,
    /// Summary CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG path; defaults to the summary path with an .svg extension, else comparison.svg.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
    /// Monte Carlo trials for the small-network check.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn load_config(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>> {
    match path {
        Some(p) => io::parse_key_values(&std::fs::read_to_string(p)?),
        None => Ok(BTreeMap::new()),
    }
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    file.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::invalid(format!("config key {key} has bad value {v:?}")))
        })
        .transpose()
}

fn list_from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Vec<T>> {
    match file.get(key) {
        None => Ok(Vec::new()),
        Some(v) => parse_list(v)
            .map_err(|_| Error::invalid(format!("config key {key} has bad list {v:?}"))),
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, ()> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| ()))
        .collect()
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Parsed `simulate` request.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatePlan {
    pub base: SimConfig,
    pub gammas: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
}

impl SimulateArgs {
    pub fn plan(&self) -> Result<SimulatePlan> {
        let file = load_config(&self.config)?;
        let n = pick(self.n, from_file(&file, "n")?, 10_000);
        let seed = self
            .seed
            .or(from_file(&file, "seed")?)
            .ok_or_else(|| Error::invalid("simulate requires --seed"))?;
        let caching: CachingSpec = match self.caching.clone().or(from_file(&file, "caching")?) {
            Some(s) => s.parse()?,
            None => CachingSpec::Optimal,
        };
        let mut gammas = self.gamma_r.clone();
        if gammas.is_empty() {
            gammas = list_from_file(&file, "gamma-r")?;
        }
        if gammas.is_empty() {
            gammas.push(0.6);
        }
        let mut cluster_sizes = self.g_c.clone();
        if cluster_sizes.is_empty() {
            cluster_sizes = list_from_file(&file, "g-c")?;
        }
        if cluster_sizes.is_empty() {
            cluster_sizes = admissible_cluster_sizes(n)
                .into_iter()
                .filter(|&g| g >= 4 && g < n)
                .collect();
        }
        let self_hit = self.allow_self_hit || from_file(&file, "allow-self-hit")?.unwrap_or(false);
        let base = SimConfig {
            n,
            m: pick(self.m, from_file(&file, "m")?, 1000),
            gamma_r: gammas[0],
            g_c: cluster_sizes.first().copied().unwrap_or(1),
            delta: pick(self.delta, from_file(&file, "delta")?, 1.0),
            rate: pick(self.rate, from_file(&file, "C")?, 1.0),
            reuse_override: self.reuse.or(from_file(&file, "K")?),
            caching,
            trials: pick(self.trials, from_file(&file, "trials")?, 200),
            seed,
            allow_self_hit: self_hit,
            workers: pick(self.workers, from_file(&file, "workers")?, 0),
        };
        base.validate()?;
        Ok(SimulatePlan {
            base,
            gammas,
            cluster_sizes,
        })
    }

    fn out_path(&self) -> Result<Option<PathBuf>> {
        Ok(self.out.clone().or(from_file(&load_config(&self.config)?, "out")?))
    }
}

/// Runs a simulate plan and returns the CSV text.
pub fn cmd_simulate(plan: &SimulatePlan) -> Result<String> {
    let mut results = Vec::with_capacity(plan.gammas.len());
    for &gamma_r in &plan.gammas {
        let base = SimConfig {
            gamma_r,
            ..plan.base.clone()
        };
        let sweep = sweep_cluster_sizes(&base, &plan.cluster_sizes)?;
        results.push((base, sweep));
    }
    let blocks: Vec<SimulatedBlock<'_>> = results
        .iter()
        .map(|(base, sweep)| SimulatedBlock { base, sweep })
        .collect();
    io::write_simulate_csv(&blocks)
}

/// Parsed `theory` request.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryPlan {
    pub params: Vec<TheoryParams>,
    pub p_grid: Option<Vec<f64>>,
    pub cluster_sizes: Vec<usize>,
    pub points: usize,
    pub baselines: bool,
}

impl TheoryArgs {
    pub fn plan(&self) -> Result<TheoryPlan> {
        let file = load_config(&self.config)?;
        let mut gammas = self.gamma_r.clone();
        if gammas.is_empty() {
            gammas = list_from_file(&file, "gamma-r")?;
        }
        if gammas.is_empty() {
            gammas.push(0.6);
        }
        let n = pick(self.n, from_file(&file, "n")?, 10_000);
        let m = pick(self.m, from_file(&file, "m")?, 1000);
        let reuse = pick(self.reuse, from_file(&file, "K")?, 4.0);
        let rate = pick(self.rate, from_file(&file, "C")?, 1.0);
        let delta = pick(self.delta, from_file(&file, "delta")?, 1.0);
        let rho1 = self.rho1.or(from_file(&file, "rho1")?);
        let rho2 = self.rho2.or(from_file(&file, "rho2")?);
        let rho3 = self.rho3.or(from_file(&file, "rho3")?);
        let params = gammas
            .iter()
            .map(|&gamma_r| {
                let p = TheoryParams {
                    gamma_r,
                    m,
                    n,
                    reuse,
                    rate,
                    delta,
                    rho1,
                    rho2,
                    rho3,
                };
                p.validate().map(|_| p)
            })
            .collect::<Result<Vec<_>>>()?;
        let raw_grid = self.p_grid.clone().or_else(|| file.get("p-grid").cloned());
        let p_grid = raw_grid
            .map(|g| parse_list::<f64>(&g).map_err(|_| Error::invalid(format!("bad --p-grid {g:?}"))))
            .transpose()?;
        let mut cluster_sizes = self.g_c.clone();
        if cluster_sizes.is_empty() {
            cluster_sizes = list_from_file(&file, "g-c")?;
        }
        let baselines = self.baselines || (p_grid.is_none() && cluster_sizes.is_empty());
        Ok(TheoryPlan {
            params,
            p_grid,
            cluster_sizes,
            points: self.points,
            baselines,
        })
    }
}

/// Curves of one theory plan, per parameter set.
pub fn theory_curves(plan: &TheoryPlan) -> Result<Vec<(TheoryParams, TradeoffCurve)>> {
    let mut blocks = Vec::new();
    for params in &plan.params {
        let mut curve = TradeoffCurve::default();
        match (&plan.p_grid, plan.cluster_sizes.is_empty()) {
            (Some(grid), _) => {
                let grid = CurveGrid::Outage(grid.clone());
                curve.extend(achievable_curve(params, &grid)?);
                curve.extend(outer_bound_curve(params, &grid)?);
            }
            (None, false) => {
                let sizes = CurveGrid::ClusterSizes(plan.cluster_sizes.iter().map(|&g| g as f64).collect());
                let achievable = achievable_curve(params, &sizes)?;
                let ps: Vec<f64> = achievable.points.iter().map(|pt| pt.p.clamp(0.0, 1.0)).collect();
                curve.extend(achievable);
                curve.extend(outer_bound_curve(params, &CurveGrid::Outage(ps))?);
            }
            (None, true) => {
                curve.extend(default_achievable_curve(params, plan.points)?);
                curve.extend(default_outer_curve(params, plan.points)?);
            }
        }
        if plan.baselines {
            curve.extend(baseline_throughputs(params.n, params.m, params.rate)?.curve());
        }
        blocks.push((params.clone(), curve));
    }
    Ok(blocks)
}

pub fn cmd_theory(plan: &TheoryPlan) -> Result<String> {
    io::write_theory_csv_multi(&theory_curves(plan)?)
}

/// Output of `compare`.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<io::ComparisonRow>,
    pub summary_csv: String,
    pub svg: String,
    pub max_rel_error: f64,
}

pub fn cmd_compare(left_csv: &str, right_csv: &str, against: SourceTag, rate: f64) -> Result<Comparison> {
    let left = io::read_curves(left_csv, rate)?;
    let right = io::read_curves(right_csv, rate)?;
    let rows = io::compare_curves(&left, &right, against)?;
    let summary_csv = io::write_comparison_csv(&rows)?;
    let max_rel_error = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);

    let mut series = Vec::new();
    for (side, curves) in [("left", &left), ("right", &right)] {
        for c in curves.iter() {
            series.push(Series {
                label: format!("{} {} g={}", side, c.source, io::fmt_float(c.gamma_r)),
                points: c.points.clone(),
                dashed: side == "right",
            });
        }
    }
    let svg = io::render_svg("min per-user throughput vs outage", &series);
    Ok(Comparison {
        rows,
        summary_csv,
        svg,
        max_rel_error,
    })
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_manifest(path: &Option<PathBuf>, manifest: RunManifest) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, manifest.to_text())?;
    }
    Ok(())
}

fn svg_path(args: &CompareArgs) -> PathBuf {
    match (&args.svg, &args.out) {
        (Some(p), _) => p.clone(),
        (None, Some(out)) => out.with_extension("svg"),
        (None, None) => Path::new("comparison.svg").to_path_buf(),
    }
}

/// Executes a parsed command, writing CSV to `--out` or `stdout` and status to `stderr`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Simulate(args) => {
            let started = unix_now();
            let plan = args.plan()?;
            let csv = cmd_simulate(&plan)?;
            emit(&args.out_path()?, &csv, stdout)?;
            write_manifest(
                &args.manifest,
                RunManifest {
                    tool_version: VERSION.into(),
                    command: "simulate".into(),
                    seed: Some(plan.base.seed),
                    sim: Some(plan.base.clone()),
                    gammas: plan.gammas.clone(),
                    cluster_sizes: plan.cluster_sizes.clone(),
                    theory: None,
                    started_unix: started,
                    finished_unix: unix_now(),
                },
            )?;
            Ok(0)
        }
        Command::Theory(args) => {
            let started = unix_now();
            let plan = args.plan()?;
            let blocks = theory_curves(&plan)?;
            for (params, curve) in &blocks {
                for w in &curve.warnings {
                    writeln!(stderr, "warning gamma_r={}: {w}", params.gamma_r)?;
                }
            }
            emit(&args.out, &io::write_theory_csv_multi(&blocks)?, stdout)?;
            write_manifest(
                &args.manifest,
                RunManifest {
                    tool_version: VERSION.into(),
                    command: "theory".into(),
                    seed: None,
                    sim: None,
                    gammas: plan.params.iter().map(|p| p.gamma_r).collect(),
                    cluster_sizes: plan.cluster_sizes.clone(),
                    theory: plan.params.first().cloned(),
                    started_unix: started,
                    finished_unix: unix_now(),
                },
            )?;
            Ok(0)
        }
        Command::Compare(args) => {
            let against: SourceTag = args.against.parse()?;
            let left = std::fs::read_to_string(&args.left)?;
            let right = std::fs::read_to_string(&args.right)?;
            let cmp = cmd_compare(&left, &right, against, args.rate)?;
            emit(&args.out, &cmp.summary_csv, stdout)?;
            let svg = svg_path(args);
            std::fs::write(&svg, &cmp.svg)?;
            writeln!(
                stderr,
                "compared {} points, max relative error {}, plot {}",
                cmp.rows.len(),
                io::fmt_float(cmp.max_rel_error),
                svg.display()
            )?;
            Ok(0)
        }
        Command::Oracle(args) => {
            let mut checks = oracle::caching_oracle_suite(args.resolution)?;
            checks.extend(oracle::enumeration_suite(args.trials, args.seed)?);
            let mut failed = 0;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                failed += usize::from(!c.passed);
                writeln!(stdout, "{tag} {}: {}", c.name, c.detail)?;
            }
            writeln!(stdout, "{} checks, {failed} failed", checks.len())?;
            Ok(if failed == 0 { 0 } else { 2 })
        }
    }
}

/// Entry point shared by the binary and tests. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                writeln!(
                    stderr,
                    "error kind=usage code=1 message={:?}",
                    e.to_string().lines().next().unwrap_or_default()
                )
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            let _ = writeln!(
                stderr,
                "error kind={} code={code} message={:?}",
                e.kind(),
                e.to_string()
            );
            code
        }
    }
}
