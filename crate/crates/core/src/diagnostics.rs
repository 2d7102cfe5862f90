//! Finite-`u` diagnostics: the Tauberian ratio, the covariance of the
//! rescaled residual process, and the Taylor root predictor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::excursion::{c2_root_predictor, crossing_bounds};
use crate::gauss_sim::{build_sampler, path_derivative_at_zero, sample_conditional_exceedance, SamplerPlan};
use crate::grid::Grid;
use crate::kernels::{c_alpha, delta_u, pitman_ratio, second_derivative_at_zero, Kernel};
use crate::rng::Seed;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitmanRow {
    pub t: f64,
    pub ratio: f64,
}

/// Ratio at `points` log-spaced lags from `t_max` down to `t_min`.
pub fn pitman_table<T: Real>(k: &Kernel<T>, t_max: T, t_min: T, points: usize) -> Result<Vec<PitmanRow>> {
    if !(t_min > T::zero() && t_max > t_min) || points < 2 {
        return Err(domain("pitman table needs 0 < t_min < t_max and at least two points"));
    }
    let (hi, lo) = (t_max.ln(), t_min.ln());
    (0..points)
        .map(|i| {
            let frac = T::lit(i as f64 / (points - 1) as f64);
            let t = (hi + (lo - hi) * frac).exp();
            Ok(PitmanRow { t: t.as_f64(), ratio: pitman_ratio(k, t)?.as_f64() })
        })
        .collect()
}

/// Empirical against theoretical covariance of `u * Z_{s delta_u}` and
/// `u * Z_{t delta_u}`, where `Z_t = X_t - R(t) X_0 / R(0)` on conditioned paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCell {
    pub s: f64,
    pub t: f64,
    pub empirical: f64,
    pub standard_error: f64,
    /// Limit value `C_alpha (|s|^alpha + |t|^alpha - |s - t|^alpha)`.
    pub limit: f64,
    /// Exact value at this `u`: `u^2 (R((s - t) delta) - R(s delta) R(t delta) / R(0))`.
    pub exact: f64,
}

/// Simulation grid for the covariance panel, in units of `delta_u`.
pub fn residual_grid<T: Real>(k: &Kernel<T>, u: T, step_factor: T, window_factor: T) -> Result<Grid<T>> {
    let d = delta_u(k, u)?;
    Grid::new(step_factor * d, window_factor * d)
}

pub fn covariance_panel<T: Real>(
    plan: &SamplerPlan<T>,
    u: T,
    pairs: &[(f64, f64)],
    n: usize,
    seed: Seed,
) -> Result<Vec<CovarianceCell>> {
    let k = plan.kernel();
    let grid = plan.grid();
    if n < 2 {
        return Err(Error::EmptySample { needed: 2, got: n });
    }
    let d = delta_u(k, u)?;
    let c = c_alpha(k.alpha())?;
    let index = |s: f64| {
        grid.index_of(T::lit(s) * d)
            .ok_or_else(|| domain(format!("lag {s} delta_u outside the simulation window")))
    };
    let idx: Vec<(usize, usize)> = pairs.iter().map(|&(s, t)| Ok((index(s)?, index(t)?))).collect::<Result<_>>()?;
    let o = grid.origin_index();
    let r0 = k.r0();
    let products: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let p = sample_conditional_exceedance(plan, u, seed.substream(i));
            let x0 = p.values[o];
            let z = |j: usize| u * (p.values[j] - k.value(grid.time(j)) / r0 * x0);
            idx.iter().map(|&(a, b)| (z(a) * z(b)).as_f64()).collect()
        })
        .collect();
    let nf = n as f64;
    let alpha = k.alpha().as_f64();
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(col, &(s, t))| {
            let mean = products.iter().map(|r| r[col]).sum::<f64>() / nf;
            let var = products.iter().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            let (ts, tt) = (grid.time(idx[col].0), grid.time(idx[col].1));
            let exact = u * u * (k.value(ts - tt) - k.value(ts) * k.value(tt) / r0);
            CovarianceCell {
                s,
                t,
                empirical: mean,
                standard_error: (var / nf).sqrt(),
                limit: c.as_f64() * (s.abs().powf(alpha) + t.abs().powf(alpha) - (s - t).abs().powf(alpha)),
                exact: exact.as_f64(),
            }
        })
        .collect())
}

/// Builds the plan for [`covariance_panel`] and runs it.
pub fn covariance_diagnostic<T: Real>(
    k: &Kernel<T>,
    u: T,
    step_factor: T,
    window_factor: T,
    pairs: &[(f64, f64)],
    n: usize,
    seed: Seed,
) -> Result<Vec<CovarianceCell>> {
    let plan = build_sampler(k, &residual_grid(k, u, step_factor, window_factor)?)?;
    covariance_panel(&plan, u, pairs, n, seed)
}

/// Taylor prediction of `tau_u^+` against the measured crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootComparison {
    pub predicted: f64,
    pub measured: f64,
}

impl RootComparison {
    pub fn relative_gap(&self) -> f64 {
        (self.predicted - self.measured).abs() / self.measured
    }
}

/// Compares the Taylor root, built from the conditioned value at the origin,
/// the finite-difference slope and the curvature `R''(0) X_0 / R(0)`, with the
/// interpolated `tau_u^+` for each uncensored replicate.
pub fn root_predictor_comparison<T: Real>(plan: &SamplerPlan<T>, u: T, n: usize, seed: Seed) -> Result<Vec<RootComparison>> {
    let k = plan.kernel();
    let r2 = second_derivative_at_zero(k)?;
    let r0 = k.r0();
    let rows: Vec<Option<RootComparison>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let p = sample_conditional_exceedance(plan, u, seed.substream(i));
            let hit = crossing_bounds(&p, u)?;
            if hit.censored_right {
                return Ok(None);
            }
            let x0 = p.at_origin();
            let slope = path_derivative_at_zero(&p)?;
            let predicted = c2_root_predictor(x0, slope, r2 * x0 / r0, u)?;
            Ok(Some(RootComparison { predicted: predicted.as_f64(), measured: hit.tau_plus.as_f64() }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
