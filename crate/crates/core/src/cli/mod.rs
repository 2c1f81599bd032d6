//! Command-line front end: argument parsing, dispatch and output.

pub mod config;
pub mod output;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::mc::collect_samples;
use crate::mittag_leffler::{ml_eval, ml_log_eval, MLOrder};
use crate::processes::Model;
use crate::rate_functions::{
    conjugate, md_rate_explicit_case1, md_rate_explicit_case2, ConjugateOptions, LimitCumulant,
};
use crate::stats::ks_critical;
use crate::subordinators::{sample_inverse_stable, StableIndex};
use crate::verification::{
    estimate_ld_rate, estimate_md_rate, weak_convergence, EventSet, MdDiagnostic, ScalingFamily,
};
use crate::Error;

pub use config::{parse_config, ConfigError, ConfigErrorKind, Format, RunConfig};
pub use output::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "ncmd", version, about = "Deviation and weak-limit toolkit for time-changed Lévy processes")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the configured output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Overrides the configured output path; stdout when neither is set.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for Monte Carlo loops. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulateKind {
    Process,
    InverseStable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RateFunction {
    Psi,
    Upsilon,
    PsiTilde,
    UpsilonTilde,
}

#[derive(Debug, Subcommand)]
#[command(allow_negative_numbers = true)]
pub enum Command {
    /// Evaluate the Mittag-Leffler function E_alpha at one or more points.
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
    },
    /// Draw replicas of the configured process, or of an inverse stable subordinator.
    Simulate {
        #[arg(long, value_enum, default_value = "process")]
        kind: SimulateKind,
        /// Must agree with the configuration when given.
        #[arg(long)]
        condition: Option<u8>,
        /// Stability index for `--kind inverse-stable`.
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Evaluate a limit cumulant function, or its Legendre transform with `--conjugate`.
    Rate {
        #[arg(long, value_enum)]
        function: RateFunction,
        #[arg(long)]
        conjugate: bool,
        /// `lo:hi:n`, once for every axis or once per axis.
        #[arg(long, default_value = "-2:2:5", allow_hyphen_values = true)]
        grid: Vec<String>,
        /// Add the explicit moderate-deviation rate as a column.
        #[arg(long)]
        closed_form: bool,
        /// Report the best grid point without the ascent refinement.
        #[arg(long)]
        grid_only: bool,
    },
    /// Distance between the rescaled process and its weak limit at each `t`.
    VerifyWeak {
        #[arg(long)]
        condition: Option<u8>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// MGF argument; 0.5 on every axis by default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta: Option<Vec<f64>>,
    },
    /// Empirical large-deviation rate of `X(t)/t` against its target.
    VerifyLd {
        #[arg(long, default_value = "all")]
        set: String,
        #[arg(long, value_delimiter = ',', required = true)]
        t_grid: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
    },
    /// Empirical moderate-deviation rate against its target.
    VerifyMd {
        #[arg(long, default_value = "all")]
        set: String,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        t_grid: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Usage(String),
    Compute(Error),
    Io(String),
    Output(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(e) => e.kind.code(),
            CliError::Usage(_) => "E100",
            CliError::Compute(_) => "E200",
            CliError::Io(_) => "E300",
            CliError::Output(_) => "E301",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid configuration: {}", e.message),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) | CliError::Output(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

/// Output bytes of one invocation and where they should go.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub bytes: Vec<u8>,
    pub output: Option<PathBuf>,
}

fn load_config(cli: &Cli) -> Result<Option<RunConfig>, CliError> {
    let Some(path) = &cli.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Some(parse_config(&text)?))
}

fn require(cfg: &Option<RunConfig>) -> Result<&RunConfig, CliError> {
    cfg.as_ref()
        .ok_or_else(|| CliError::Usage("this subcommand needs --config".into()))
}

fn check_condition(cfg: &RunConfig, flag: Option<u8>) -> Result<(), CliError> {
    match flag {
        Some(c) if c != cfg.condition() => Err(CliError::Usage(format!(
            "--condition {c} conflicts with the configuration, which describes condition {}",
            cfg.condition()
        ))),
        _ => Ok(()),
    }
}

/// Parses `lo:hi:n` into `n` evenly spaced points.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid axis must look like lo:hi:n, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Cartesian product of the axes, first axis varying slowest.
pub fn grid_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn names(prefix: &str, h: usize) -> Vec<String> {
    (1..=h).map(|i| format!("{prefix}{i}")).collect()
}

fn ml_table(alpha: f64, xs: &[f64]) -> Result<Table, CliError> {
    let order = MLOrder::new(alpha)?;
    let mut table = Table::new(["alpha", "x", "value", "log_value"]);
    for &x in xs {
        let value = match ml_eval(order, x) {
            Ok(v) => v,
            Err(Error::Overflow(_)) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        table.push(vec![alpha.into(), x.into(), value.into(), ml_log_eval(order, x)?.into()]);
    }
    Ok(table)
}

fn simulate_inverse_stable(nu: f64, ts: &[f64], n: usize, seed: u64) -> Result<Table, CliError> {
    let nu = StableIndex::new(nu)?;
    let mut table = Table::new(["replica", "t", "value"]);
    for (k, &t) in ts.iter().enumerate() {
        let draws = collect_samples(n, seed, (k as u64) << 32, |rng| sample_inverse_stable(nu, t, rng));
        for (r, d) in draws.into_iter().enumerate() {
            table.push(vec![r.into(), t.into(), d?.into()]);
        }
    }
    Ok(table)
}

fn simulate_process(model: &Model, t: f64, n: usize, seed: u64) -> Result<Table, CliError> {
    let draws = collect_samples(n, seed, 0, |rng| model.sample(t, rng));
    let mut table = Table::new(["replica", "component", "value"]);
    for (r, d) in draws.into_iter().enumerate() {
        for (i, v) in d?.into_iter().enumerate() {
            table.push(vec![r.into(), (i + 1).into(), v.into()]);
        }
    }
    Ok(table)
}

fn limit_function(cfg: &RunConfig, function: RateFunction) -> Result<LimitCumulant, CliError> {
    let m = cfg.mean_vector();
    let mismatch = |name: &str, cond: u8| CliError::Usage(format!("{name} needs a condition {cond} configuration"));
    Ok(match (function, &cfg.model) {
        (RateFunction::Psi, Model::Cond1(c)) => LimitCumulant::Psi(c.clone()),
        (RateFunction::PsiTilde, Model::Cond1(c)) => LimitCumulant::PsiTilde(c.clone(), m),
        (RateFunction::Upsilon, Model::Cond2(c)) => LimitCumulant::Upsilon(c.clone()),
        (RateFunction::UpsilonTilde, Model::Cond2(c)) => LimitCumulant::UpsilonTilde(c.clone(), m),
        (RateFunction::Psi, _) => return Err(mismatch("psi", 1)),
        (RateFunction::PsiTilde, _) => return Err(mismatch("psi-tilde", 1)),
        (RateFunction::Upsilon, _) => return Err(mismatch("upsilon", 2)),
        (RateFunction::UpsilonTilde, _) => return Err(mismatch("upsilon-tilde", 2)),
    })
}

fn explicit_rate(cfg: &RunConfig, x: &[f64]) -> Result<f64, CliError> {
    let Model::Cond1(c) = &cfg.model else {
        return Err(CliError::Usage("--closed-form is available for psi-tilde only".into()));
    };
    let m = cfg.mean_vector();
    let nus = c.nus();
    if nus.iter().all(|&nu| c.nu0() < nu) {
        Ok(md_rate_explicit_case1(c, &m, x)?)
    } else {
        Ok(md_rate_explicit_case2(c, &m, x)?)
    }
}

fn rate_table(
    cfg: &RunConfig,
    function: RateFunction,
    grid: &[String],
    transform: bool,
    closed_form: bool,
    grid_only: bool,
) -> Result<Table, CliError> {
    let f = limit_function(cfg, function)?;
    let h = f.h();
    let axes = match grid.len() {
        1 => vec![parse_axis(&grid[0])?; h],
        n if n == h => grid.iter().map(|g| parse_axis(g)).collect::<Result<_, _>>()?,
        n => return Err(CliError::Usage(format!("{n} grid axes given for dimension {h}"))),
    };
    if closed_form && (!transform || function != RateFunction::PsiTilde) {
        return Err(CliError::Usage("--closed-form needs --conjugate --function psi-tilde".into()));
    }
    let points = grid_points(&axes);
    if !transform {
        let mut table = Table::new(names("theta", h).into_iter().chain(["value".into()]));
        for p in points {
            let v = f.eval(&p);
            table.push(p.into_iter().map(Cell::from).chain([v.into()]).collect());
        }
        return Ok(table);
    }
    let mut columns = names("x", h);
    columns.push("value".into());
    columns.extend(names("argmax", h));
    if closed_form {
        columns.push("closed_form".into());
    }
    let opts = ConjugateOptions {
        grid_only,
        ..ConjugateOptions::default()
    };
    let mut table = Table::new(columns);
    for p in points {
        let res = conjugate(&f, &p, &opts)?;
        let mut row: Vec<Cell> = p.iter().copied().map(Cell::from).collect();
        row.push(res.value.into());
        match &res.argmax_theta {
            Some(a) => row.extend(a.iter().copied().map(Cell::from)),
            None => row.extend((0..h).map(|_| Cell::from(f64::INFINITY))),
        }
        if closed_form {
            row.push(explicit_rate(cfg, &p)?.into());
        }
        table.push(row);
    }
    Ok(table)
}

fn weak_table(cfg: &RunConfig, ts: &[f64], n: usize, theta: Option<Vec<f64>>, seed: u64) -> Result<Table, CliError> {
    let h = cfg.model.h();
    let theta = theta.unwrap_or_else(|| vec![0.5; h]);
    let rows = weak_convergence(&cfg.model, &theta, ts, n, seed)?;
    let crit = ks_critical(0.05, n, n);
    let mut table = Table::new(["t", "component", "ks", "ks_critical", "mgf_z"]);
    for row in rows {
        for (i, ks) in row.ks.iter().enumerate() {
            table.push(vec![row.t.into(), (i + 1).into(), (*ks).into(), crit.into(), row.mgf_z.into()]);
        }
    }
    Ok(table)
}

fn diagnostic_table(d: MdDiagnostic) -> Table {
    let mut table = Table::new(["t", "hits", "n", "estimate", "se", "target", "flagged"]);
    for r in d.rows {
        table.push(vec![
            r.t.into(),
            r.hits.into(),
            r.n.into(),
            r.estimate.into(),
            r.se.into(),
            d.target.into(),
            r.flagged.into(),
        ]);
    }
    table
}

fn parse_set(s: &str) -> Result<EventSet, CliError> {
    s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn build_table(cli: &Cli, cfg: &Option<RunConfig>, seed: u64) -> Result<Table, CliError> {
    match &cli.command {
        Command::MlEval { alpha, x } => ml_table(*alpha, x),
        Command::Simulate {
            kind: SimulateKind::InverseStable,
            nu,
            t,
            n,
            ..
        } => {
            let nu = nu.ok_or_else(|| CliError::Usage("--kind inverse-stable needs --nu".into()))?;
            simulate_inverse_stable(nu, t, *n, seed)
        }
        Command::Simulate { condition, t, n, .. } => {
            let cfg = require(cfg)?;
            check_condition(cfg, *condition)?;
            let [t] = t.as_slice() else {
                return Err(CliError::Usage("process simulation takes a single --t".into()));
            };
            simulate_process(&cfg.model, *t, *n, seed)
        }
        Command::Rate {
            function,
            conjugate,
            grid,
            closed_form,
            grid_only,
        } => rate_table(require(cfg)?, *function, grid, *conjugate, *closed_form, *grid_only),
        Command::VerifyWeak { condition, t, n, theta } => {
            let cfg = require(cfg)?;
            check_condition(cfg, *condition)?;
            weak_table(cfg, t, *n, theta.clone(), seed)
        }
        Command::VerifyLd { set, t_grid, n } => {
            let cfg = require(cfg)?;
            let d = estimate_ld_rate(&cfg.model, &parse_set(set)?, t_grid, *n, seed)?;
            Ok(diagnostic_table(d))
        }
        Command::VerifyMd { set, gamma, t_grid, n } => {
            let cfg = require(cfg)?;
            let scaling = ScalingFamily::new(*gamma)?;
            let d = estimate_md_rate(&cfg.model, &cfg.mean_vector(), &parse_set(set)?, &scaling, t_grid, *n, seed)?;
            Ok(diagnostic_table(d))
        }
    }
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        _ => Ok(f()),
    }
}

/// Runs the command and serializes its table without touching the filesystem for output.
pub fn render(cli: &Cli) -> Result<Rendered, CliError> {
    let cfg = load_config(cli)?;
    let seed = cli.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
    let format = cli.format.or(cfg.as_ref().map(|c| c.format)).unwrap_or_default();
    let output = cli.output.clone().or(cfg.as_ref().and_then(|c| c.output.clone()));
    let table = with_threads(cli.threads, || build_table(cli, &cfg, seed))??;
    let echo = cfg.as_ref().map_or(Value::Null, |c| c.source.clone());
    let mut bytes = Vec::new();
    table.write(&mut bytes, format, &echo, seed)?;
    Ok(Rendered { bytes, output })
}

/// Runs the command and writes to the configured destination.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let rendered = render(cli)?;
    match &rendered.output {
        Some(path) => std::fs::write(path, &rendered.bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&rendered.bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
