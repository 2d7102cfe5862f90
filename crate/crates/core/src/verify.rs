//! Monte Carlo verification of the two limit theorems.
//!
//! * C² regime: lengths `u (tau^+ - tau^-)` of excursions of exactly
//!   conditioned paths against the closed-form limit law (one-sample KS).
//! * Heavy-tail regime: lengths in units of `delta_u` against independent
//!   draws of the limit hitting interval (two-sample KS).
//!
//! Replicate `i` of the finite-`u` batch uses `seed.substream(0).substream(i)`;
//! limit-process draws use `seed.substream(1).substream(i)`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::excursion::crossing_bounds;
use crate::gauss_sim::{build_sampler, sample_conditional_exceedance, SamplerPlan, SynthesisMethod};
use crate::grid::Grid;
use crate::kernels::{delta_u, make_kernel, Kernel};
use crate::limit_law::{c2_limit_cdf, c2_limit_quantile, C2LimitParams};
use crate::limit_process::{LimitSampler, DEFAULT_LIMIT_HALF_WIDTH, DEFAULT_LIMIT_STEP};
use crate::rng::Seed;
use crate::scalar::Real;
use crate::stats::{ks_one_sample, ks_two_sample, wasserstein1, SampleSet};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MASTER_SEED: u64 = 20_240_917;
pub const DEFAULT_GRID_STEP_FACTOR: f64 = 0.01;
pub const DEFAULT_C2_WINDOW_FACTOR: f64 = 20.0;
pub const DEFAULT_HT_WINDOW_FACTOR: f64 = 50.0;
pub const DEFAULT_C2_U: f64 = 6.0;
pub const DEFAULT_HT_U: f64 = 10.0;
/// Largest tolerated fraction of censored replicates.
pub const CENSOR_BUDGET: f64 = 0.005;
pub const MIN_REPLICATES: usize = 100;
pub const REPORT_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    C2,
    HeavyTail,
}

/// Everything a verification run depends on; echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationConfig {
    pub regime: Regime,
    pub alpha: f64,
    pub r0: f64,
    pub u: f64,
    pub n: usize,
    /// Grid step in units of the excursion time scale (`1/u` or `delta_u`).
    pub grid_step_factor: f64,
    /// Half width of the simulation window in the same units.
    pub window_factor: f64,
    /// Limit-process grid (heavy tail only), in limit time units.
    pub limit_step: f64,
    pub limit_half_width: f64,
    pub master_seed: u64,
}

impl VerificationConfig {
    pub fn c2(u: f64, n: usize, master_seed: u64) -> Self {
        VerificationConfig {
            regime: Regime::C2,
            alpha: 2.0,
            r0: 1.0,
            u,
            n,
            grid_step_factor: DEFAULT_GRID_STEP_FACTOR,
            window_factor: DEFAULT_C2_WINDOW_FACTOR,
            limit_step: DEFAULT_LIMIT_STEP,
            limit_half_width: DEFAULT_LIMIT_HALF_WIDTH,
            master_seed,
        }
    }

    pub fn heavy_tail(alpha: f64, u: f64, n: usize, master_seed: u64) -> Self {
        VerificationConfig {
            regime: Regime::HeavyTail,
            alpha,
            window_factor: DEFAULT_HT_WINDOW_FACTOR,
            ..Self::c2(u, n, master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.regime {
            Regime::C2 if self.alpha != 2.0 => {
                return Err(domain(format!("C2 regime needs alpha = 2, got {}", self.alpha)))
            }
            Regime::HeavyTail if !(self.alpha > 0.0 && self.alpha < 2.0) => {
                return Err(domain(format!("heavy-tail regime needs alpha in (0, 2), got {}", self.alpha)))
            }
            _ => {}
        }
        if self.n < MIN_REPLICATES {
            return Err(Error::EmptySample { needed: MIN_REPLICATES, got: self.n });
        }
        let positive = [
            ("r0", self.r0),
            ("u", self.u),
            ("grid step factor", self.grid_step_factor),
            ("window factor", self.window_factor),
            ("limit step", self.limit_step),
            ("limit half width", self.limit_half_width),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn kernel<T: Real>(&self) -> Result<Kernel<T>> {
        make_kernel(T::lit(self.alpha), T::lit(self.r0))
    }

    /// `1/u` in the C² regime, `delta_u` in the heavy-tail regime.
    pub fn time_scale<T: Real>(&self) -> Result<T> {
        match self.regime {
            Regime::C2 => Ok(T::lit(self.u).recip()),
            Regime::HeavyTail => delta_u(&self.kernel::<T>()?, T::lit(self.u)),
        }
    }

    /// Simulation grid in physical time.
    pub fn grid<T: Real>(&self) -> Result<Grid<T>> {
        let scale = self.time_scale::<T>()?;
        Grid::new(T::lit(self.grid_step_factor) * scale, T::lit(self.window_factor) * scale)
    }

    pub fn limit_grid<T: Real>(&self) -> Result<Grid<T>> {
        Grid::new(T::lit(self.limit_step), T::lit(self.limit_half_width))
    }
}

/// Unscaled excursion lengths of `n` conditioned paths; censored replicates
/// are counted and dropped.
pub fn excursion_lengths<T: Real>(plan: &SamplerPlan<T>, u: T, n: usize, seed: Seed) -> Result<SampleSet<T>> {
    let results: Vec<Option<T>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let path = sample_conditional_exceedance(plan, u, seed.substream(i));
            crossing_bounds(&path, u).map(|r| r.length())
        })
        .collect::<Result<_>>()?;
    let censored = results.iter().filter(|r| r.is_none()).count();
    SampleSet::new(results.into_iter().flatten().collect(), censored, seed.key())
}

/// `n` limit hitting-interval lengths; censored draws are counted and dropped.
pub fn limit_lengths<T: Real>(sampler: &LimitSampler<T>, n: usize, seed: Seed) -> Result<SampleSet<T>> {
    let results: Vec<Option<T>> = (0..n as u64)
        .into_par_iter()
        .map(|i| sampler.sample(seed.substream(i)).map(|s| s.length()))
        .collect::<Result<_>>()?;
    let censored = results.iter().filter(|r| r.is_none()).count();
    SampleSet::new(results.into_iter().flatten().collect(), censored, seed.key())
}

fn check_censoring<T: Real>(s: &SampleSet<T>) -> Result<()> {
    if s.censor_rate() > CENSOR_BUDGET {
        return Err(Error::CensorBudgetExceeded { censored: s.n_censored, total: s.total() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub p: f64,
    pub empirical: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisInfo {
    pub method: SynthesisMethod,
    pub embedding_size: Option<usize>,
    pub jitter: f64,
    pub factor_error: f64,
    pub grid_points: usize,
    pub grid_step: f64,
    pub grid_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub regime: Regime,
    pub ks_stat: f64,
    pub ks_pvalue: f64,
    pub wasserstein1: f64,
    pub quantiles: Vec<QuantileRow>,
    /// Replicates attempted.
    pub n: usize,
    pub n_censored: usize,
    /// Limit-process draws (heavy tail only).
    pub reference_n: Option<usize>,
    pub reference_n_censored: Option<usize>,
    /// Factor converting physical time to the scaled lengths.
    pub time_scale: f64,
    pub delta_u: Option<f64>,
    pub limit_scale: Option<f64>,
    pub synthesis: SynthesisInfo,
    pub config: VerificationConfig,
    pub runtime_seconds: f64,
}

impl VerificationReport {
    /// Copy with the wall-clock field zeroed, for reproducibility comparisons.
    pub fn without_runtime(&self) -> Self {
        VerificationReport { runtime_seconds: 0.0, ..self.clone() }
    }
}

/// Report plus the scaled samples it was computed from.
#[derive(Debug, Clone)]
pub struct Verification {
    pub report: VerificationReport,
    pub lengths: SampleSet<f64>,
    pub reference: Option<SampleSet<f64>>,
}

pub fn run_verification<T: Real>(cfg: &VerificationConfig) -> Result<VerificationReport> {
    run_verification_with_samples::<T>(cfg).map(|v| v.report)
}

pub fn run_verification_with_samples<T: Real>(cfg: &VerificationConfig) -> Result<Verification> {
    let started = Instant::now();
    cfg.validate()?;
    let kernel = cfg.kernel::<T>()?;
    let grid = cfg.grid::<T>()?;
    let plan = build_sampler(&kernel, &grid)?;
    let scale = cfg.time_scale::<T>()?;
    let u = T::lit(cfg.u);
    let seed = Seed::new(cfg.master_seed);

    let raw = excursion_lengths(&plan, u, cfg.n, seed.substream(0))?;
    check_censoring(&raw)?;
    let lengths = raw.scaled(scale.recip());
    let synthesis = SynthesisInfo {
        method: plan.method(),
        embedding_size: plan.embedding_size(),
        jitter: plan.jitter_used().as_f64(),
        factor_error: plan.factor_error().as_f64(),
        grid_points: grid.len(),
        grid_step: grid.step().as_f64(),
        grid_half_width: grid.half_width().as_f64(),
    };

    let (ks, w1, quantiles, reference, limit_scale) = match cfg.regime {
        Regime::C2 => {
            let params = C2LimitParams::from_kernel(&kernel)?;
            let ks = ks_one_sample(&lengths, |x| c2_limit_cdf(&params, x).as_f64())?;
            let m = lengths.len();
            let ref_quantiles: Vec<T> = (0..m)
                .into_par_iter()
                .map(|i| c2_limit_quantile(&params, T::lit((i as f64 + 0.5) / m as f64)))
                .collect::<Result<_>>()?;
            let w1 = wasserstein1(&lengths, &SampleSet::from_values(ref_quantiles)?)?;
            let rows = REPORT_QUANTILES
                .iter()
                .map(|&p| {
                    Ok(QuantileRow {
                        p,
                        empirical: lengths.quantile(T::lit(p))?.as_f64(),
                        reference: c2_limit_quantile(&params, T::lit(p))?.as_f64(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (ks, w1, rows, None, Some(params.scale().as_f64()))
        }
        Regime::HeavyTail => {
            let sampler = LimitSampler::new(kernel.alpha(), kernel.r0(), &cfg.limit_grid::<T>()?)?;
            let limit = limit_lengths(&sampler, cfg.n, seed.substream(1))?;
            check_censoring(&limit)?;
            let ks = ks_two_sample(&lengths, &limit)?;
            let w1 = wasserstein1(&lengths, &limit)?;
            let rows = REPORT_QUANTILES
                .iter()
                .map(|&p| {
                    Ok(QuantileRow {
                        p,
                        empirical: lengths.quantile(T::lit(p))?.as_f64(),
                        reference: limit.quantile(T::lit(p))?.as_f64(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (ks, w1, rows, Some(limit), None)
        }
    };

    let report = VerificationReport {
        schema_version: SCHEMA_VERSION,
        regime: cfg.regime,
        ks_stat: ks.stat,
        ks_pvalue: ks.pvalue,
        wasserstein1: w1,
        quantiles,
        n: cfg.n,
        n_censored: raw.n_censored,
        reference_n: reference.as_ref().map(|r| r.total()),
        reference_n_censored: reference.as_ref().map(|r| r.n_censored),
        time_scale: scale.as_f64(),
        delta_u: (cfg.regime == Regime::HeavyTail).then(|| scale.as_f64()),
        limit_scale,
        synthesis,
        config: cfg.clone(),
        runtime_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(Verification { report, lengths: lengths.to_f64(), reference: reference.map(|r| r.to_f64()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(VerificationConfig::c2(6.0, 5000, 1).validate().is_ok());
        assert!(VerificationConfig::heavy_tail(1.0, 10.0, 5000, 1).validate().is_ok());
        let mut c = VerificationConfig::c2(6.0, 5000, 1);
        c.alpha = 1.0;
        assert!(matches!(c.validate(), Err(Error::Domain(_))));
        assert!(matches!(VerificationConfig::heavy_tail(2.0, 10.0, 500, 1).validate(), Err(Error::Domain(_))));
        assert!(matches!(VerificationConfig::c2(6.0, 0, 1).validate(), Err(Error::EmptySample { .. })));
        assert!(matches!(VerificationConfig::c2(-6.0, 500, 1).validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn grids_follow_time_scale() {
        let c = VerificationConfig::c2(6.0, 500, 1);
        let g: Grid<f64> = c.grid().unwrap();
        assert!((g.step() - 0.01 / 6.0).abs() < 1e-15);
        assert_eq!(g.len(), 4001);
        let h = VerificationConfig::heavy_tail(1.0, 10.0, 500, 1);
        let g: Grid<f64> = h.grid().unwrap();
        let d = std::f64::consts::PI / 100.0;
        assert!((g.step() - 0.01 * d).abs() < 1e-15);
        assert_eq!(g.len(), 10001);
    }

    #[test]
    fn zero_replicates_rejected() {
        assert!(run_verification::<f64>(&VerificationConfig::c2(6.0, 0, 1)).is_err());
    }

    #[test]
    fn small_c2_run_is_reproducible() {
        let c = VerificationConfig::c2(6.0, 300, 99);
        let a = run_verification::<f64>(&c).unwrap();
        let b = run_verification::<f64>(&c).unwrap();
        assert_eq!(a.without_runtime(), b.without_runtime());
        assert_eq!(a.schema_version, 1);
        assert!((0.0..=1.0).contains(&a.ks_stat));
        assert!(a.quantiles.windows(2).all(|w| w[0].empirical <= w[1].empirical && w[0].reference <= w[1].reference));
        assert_eq!(a.delta_u, None);
    }

    #[test]
    fn censor_budget_enforced() {
        // window far narrower than the excursions
        let mut c = VerificationConfig::c2(6.0, 200, 3);
        c.window_factor = 0.05;
        c.grid_step_factor = 0.01;
        assert!(matches!(run_verification::<f64>(&c), Err(Error::CensorBudgetExceeded { .. })));
    }
}
