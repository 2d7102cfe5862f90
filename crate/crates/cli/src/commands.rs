use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use excursion_core::diagnostics::{covariance_diagnostic, pitman_table};
use excursion_core::verify::{
    run_verification_with_samples, Regime, VerificationConfig, VerificationReport, DEFAULT_C2_U, DEFAULT_GRID_STEP_FACTOR,
    DEFAULT_HT_U, DEFAULT_MASTER_SEED,
};
use excursion_core::{
    build_sampler, c2_limit_cdf, make_kernel, sample_conditional_exceedance, C2LimitParams, Error, Seed,
};

use crate::output::{emit, sibling, Cell, Table};

pub const KS_THRESHOLD_C2: f64 = 0.05;
pub const KS_THRESHOLD_HT: f64 = 0.08;
pub const KS_THRESHOLD_HT_ROUGH: f64 = 0.10;
/// Residual covariance panel evaluated by `diagnostics`.
pub const COVARIANCE_PAIRS: [(f64, f64); 3] = [(1.0, 1.0), (1.0, 2.0), (-1.0, 1.0)];

#[derive(Debug, Parser)]
#[command(name = "excursion", version, about = "Simulate and verify high-level excursions of stationary Gaussian processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare u * (excursion length) for the Gaussian kernel (alpha = 2) with its closed-form limit law.
    VerifyC2(VerifyArgs),
    /// Compare excursion lengths in units of delta_u (alpha < 2) with draws of the limit hitting interval.
    VerifyHt(VerifyArgs),
    /// Tabulate the C2 limit CDF.
    LimitCdf(LimitCdfArgs),
    /// Emit conditioned sample paths for inspection.
    SamplePaths(PathArgs),
    /// Tauberian ratio and residual covariance diagnostics (alpha < 2).
    Diagnostics(DiagnosticArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Kernel exponent in R(t) = r0 exp(-|t|^alpha) [default: 2 for verify-c2, 1 for verify-ht]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Kernel variance R(0)
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// Threshold [default: 6 for verify-c2, 10 for verify-ht]
    #[arg(long)]
    pub u: Option<f64>,
    /// Number of conditioned replicates (and of limit draws for verify-ht)
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    /// Grid step in units of the excursion time scale (1/u or delta_u)
    #[arg(long, default_value_t = DEFAULT_GRID_STEP_FACTOR)]
    pub grid_step_factor: f64,
    /// Half width of the path window in the same units [default: 20 for verify-c2, 50 for verify-ht]
    #[arg(long)]
    pub window_factor: Option<f64>,
    /// Half width of the limit-process window, in limit time units
    #[arg(long, default_value_t = 10.0)]
    pub limit_window_factor: f64,
    /// KS acceptance threshold [default: 0.05 for verify-c2; 0.08 for verify-ht with alpha >= 1, else 0.10]
    #[arg(long)]
    pub ks_threshold: Option<f64>,
    /// Master seed
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    /// Report path; a companion quantile table is written beside it
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the file at --out (the companion takes the other format)
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct LimitCdfArgs {
    /// start:end:step
    #[arg(long, default_value = "0:10:0.01")]
    pub range: String,
    /// R(0)
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// R''(0) [default: -2 r0, the Gaussian kernel]
    #[arg(long, allow_hyphen_values = true)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    /// Kernel exponent; 2 uses the 1/u time scale, below 2 uses delta_u
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// Threshold [default: 6 for alpha = 2, 10 otherwise]
    #[arg(long)]
    pub u: Option<f64>,
    /// Number of paths
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP_FACTOR)]
    pub grid_step_factor: f64,
    /// [default: 20 for alpha = 2, 50 otherwise]
    #[arg(long)]
    pub window_factor: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DiagnosticArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    #[arg(long, default_value_t = DEFAULT_HT_U)]
    pub u: f64,
    /// Replicates for the covariance panel
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP_FACTOR)]
    pub grid_step_factor: f64,
    #[arg(long, default_value_t = 50.0)]
    pub window_factor: f64,
    /// Points of the log-spaced lag grid, from 1 down to 1e-6
    #[arg(long, default_value_t = 25)]
    pub pitman_points: usize,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CensorBudgetExceeded { .. } => 3,
            Error::Synthesis(_) => 4,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: 2, message: format!("i/o: {e}") }
    }
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::VerifyC2(a) => verify(Regime::C2, a),
        Command::VerifyHt(a) => verify(Regime::HeavyTail, a),
        Command::LimitCdf(a) => limit_cdf(a),
        Command::SamplePaths(a) => sample_paths(a),
        Command::Diagnostics(a) => diagnostics(a),
    }
}

#[derive(Debug, Serialize)]
struct CliReport<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    ks_threshold: f64,
    accepted: bool,
}

fn verify(regime: Regime, a: VerifyArgs) -> Result<u8, CliError> {
    let (default_alpha, default_u) = match regime {
        Regime::C2 => (2.0, DEFAULT_C2_U),
        Regime::HeavyTail => (1.0, DEFAULT_HT_U),
    };
    let alpha = a.alpha.unwrap_or(default_alpha);
    let u = a.u.unwrap_or(default_u);
    let mut cfg = match regime {
        Regime::C2 => VerificationConfig::c2(u, a.n, a.seed),
        Regime::HeavyTail => VerificationConfig::heavy_tail(alpha, u, a.n, a.seed),
    };
    cfg.alpha = alpha;
    cfg.r0 = a.r0;
    cfg.grid_step_factor = a.grid_step_factor;
    if let Some(w) = a.window_factor {
        cfg.window_factor = w;
    }
    cfg.limit_step = a.grid_step_factor;
    cfg.limit_half_width = a.limit_window_factor;
    cfg.validate()?;
    let threshold = a.ks_threshold.unwrap_or(match regime {
        Regime::C2 => KS_THRESHOLD_C2,
        Regime::HeavyTail if alpha >= 1.0 => KS_THRESHOLD_HT,
        Regime::HeavyTail => KS_THRESHOLD_HT_ROUGH,
    });

    let v = run_verification_with_samples::<f64>(&cfg)?;
    let accepted = v.report.ks_stat <= threshold;
    let wrapped = CliReport { report: &v.report, ks_threshold: threshold, accepted };
    let json = serde_json::to_string_pretty(&wrapped).map_err(|e| CliError::config(e.to_string()))? + "\n";
    let mut table = Table::new(vec!["p", "empirical", "reference"]);
    for q in &v.report.quantiles {
        table.push(vec![q.p.into(), q.empirical.into(), q.reference.into()]);
    }
    let csv = table.to_csv();
    match (&a.out, a.format) {
        (Some(out), Format::Json) => {
            emit(Some(out), &json)?;
            emit(Some(&sibling(out, "quantiles.csv")), &csv)?;
        }
        (Some(out), Format::Csv) => {
            emit(Some(out), &csv)?;
            emit(Some(&sibling(out, "report.json")), &json)?;
        }
        (None, Format::Json) => emit(None, &json)?,
        (None, Format::Csv) => emit(None, &csv)?,
    }
    eprintln!(
        "ks_stat = {:.5} (threshold {threshold}), p = {:.4}, censored {}/{}",
        v.report.ks_stat, v.report.ks_pvalue, v.report.n_censored, v.report.n
    );
    Ok(if accepted { 0 } else { 1 })
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::config(format!("malformed range {s:?}; expected start:end:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && end.is_finite() && step.is_finite() && step > 0.0 && end >= start) {
        return Err(bad());
    }
    Ok((start, end, step))
}

fn write_table(table: &Table, out: Option<&std::path::Path>, format: Format) -> Result<(), CliError> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).map_err(|e| CliError::config(e.to_string()))? + "\n",
    };
    emit(out, &body)?;
    Ok(())
}

fn limit_cdf(a: LimitCdfArgs) -> Result<u8, CliError> {
    let (start, end, step) = parse_range(&a.range)?;
    let params = C2LimitParams::new(a.r0, a.r2.unwrap_or(-2.0 * a.r0))?;
    let count = ((end - start) / step * (1.0 + 1e-12)).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(CliError::config("range produces more than 10^7 rows"));
    }
    let mut table = Table::new(vec!["x", "cdf"]);
    for i in 0..count {
        let x = start + i as f64 * step;
        table.push(vec![x.into(), c2_limit_cdf(&params, x).into()]);
    }
    write_table(&table, a.out.as_deref(), a.format)?;
    Ok(0)
}

fn sample_paths(a: PathArgs) -> Result<u8, CliError> {
    let kernel = make_kernel(a.alpha, a.r0)?;
    let c2 = kernel.is_c2();
    let u = a.u.unwrap_or(if c2 { DEFAULT_C2_U } else { DEFAULT_HT_U });
    let window = a.window_factor.unwrap_or(if c2 { 20.0 } else { 50.0 });
    let mut cfg = if c2 { VerificationConfig::c2(u, 100, a.seed) } else { VerificationConfig::heavy_tail(a.alpha, u, 100, a.seed) };
    cfg.r0 = a.r0;
    cfg.grid_step_factor = a.grid_step_factor;
    cfg.window_factor = window;
    cfg.n = a.n.max(100);
    cfg.validate()?;
    if a.n == 0 {
        return Err(CliError::config("--n must be at least 1"));
    }
    let grid = cfg.grid::<f64>()?;
    let plan = build_sampler(&kernel, &grid)?;
    let seed = Seed::new(a.seed);
    let mut table = Table::new(vec!["t", "value", "replicate"]);
    for r in 0..a.n {
        let path = sample_conditional_exceedance(&plan, u, seed.substream(r as u64));
        for (t, v) in grid.times().zip(&path.values) {
            table.push(vec![t.into(), (*v).into(), r.into()]);
        }
    }
    write_table(&table, a.out.as_deref(), a.format)?;
    Ok(0)
}

fn diagnostics(a: DiagnosticArgs) -> Result<u8, CliError> {
    let kernel = make_kernel(a.alpha, a.r0)?;
    if !kernel.is_heavy_tail() {
        return Err(CliError::config(format!("diagnostics need alpha < 2, got {}", a.alpha)));
    }
    if a.n < 2 {
        return Err(CliError::config("--n must be at least 2"));
    }
    let mut table = Table::new(vec!["quantity", "s", "t", "value", "reference", "standard_error", "exact"]);
    for row in pitman_table(&kernel, 1.0, 1e-6, a.pitman_points)? {
        table.push(vec!["pitman_ratio".into(), Cell::Empty, row.t.into(), row.ratio.into(), 1.0.into(), Cell::Empty, Cell::Empty]);
    }
    let cells = covariance_diagnostic(&kernel, a.u, a.grid_step_factor, a.window_factor, &COVARIANCE_PAIRS, a.n, Seed::new(a.seed))?;
    for c in cells {
        table.push(vec![
            "residual_covariance".into(),
            c.s.into(),
            c.t.into(),
            c.empirical.into(),
            c.limit.into(),
            c.standard_error.into(),
            c.exact.into(),
        ]);
    }
    write_table(&table, a.out.as_deref(), a.format)?;
    Ok(0)
}
