//! Exact synthesis of stationary Gaussian paths and exact conditioning on
//! the exceedance event `X_0 > u`.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{domain, Error, Result};
use crate::grid::Grid;
use crate::kernels::Kernel;
use crate::linalg::{embed_circulant, factor_dense, standard_normals, CirculantFactor, LowerTriangular};
use crate::rng::{Seed, SimRng};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SynthesisMethod {
    CirculantEmbedding,
    DenseFactorization,
}

#[derive(Debug, Clone)]
enum Factor<T: Real> {
    Circulant(CirculantFactor<T>),
    Dense(LowerTriangular<T>),
}

impl<T: Real> Factor<T> {
    fn draw(&self, rng: &mut SimRng) -> Vec<T> {
        match self {
            Factor::Circulant(f) => f.draw(rng),
            Factor::Dense(l) => l.mul_vec(&standard_normals(rng, l.dim())),
        }
    }
}

/// Precomputed exact sampler for a kernel on a grid. Immutable once built.
#[derive(Debug, Clone)]
pub struct SamplerPlan<T: Real> {
    kernel: Kernel<T>,
    grid: Grid<T>,
    factor: Factor<T>,
    jitter: T,
    factor_error: T,
    /// `R(t_i) / R(0)`, the regression of `X_{t_i}` on `X_0`.
    regression: Vec<T>,
}

/// Prepares an exact sampler: circulant embedding first, dense Cholesky otherwise.
pub fn build_sampler<T: Real>(kernel: &Kernel<T>, grid: &Grid<T>) -> Result<SamplerPlan<T>> {
    let n = grid.len();
    let step = grid.step();
    let cov = |lag: usize| kernel.value(step * T::from_usize_lossy(lag));
    if !cov(2 * n).is_finite() {
        return Err(domain("kernel not finite over the grid span"));
    }
    let (factor, jitter, factor_error) = match embed_circulant(n, cov) {
        Some(f) => {
            let e = f.relative_error;
            (Factor::Circulant(f), T::zero(), e)
        }
        None => {
            let mut a = vec![T::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = cov(i.abs_diff(j));
                }
            }
            let dense = factor_dense(&a, n, kernel.r0()).map_err(|e| match e {
                Error::Synthesis(msg) => Error::Synthesis(format!("no exact embedding and dense fallback failed: {msg}")),
                other => other,
            })?;
            (Factor::Dense(dense.lower), dense.jitter, dense.relative_error)
        }
    };
    let regression = grid.times().map(|t| kernel.value(t) / kernel.r0()).collect();
    Ok(SamplerPlan { kernel: *kernel, grid: *grid, factor, jitter, factor_error, regression })
}

impl<T: Real> SamplerPlan<T> {
    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn method(&self) -> SynthesisMethod {
        match self.factor {
            Factor::Circulant(_) => SynthesisMethod::CirculantEmbedding,
            Factor::Dense(_) => SynthesisMethod::DenseFactorization,
        }
    }

    pub fn jitter_used(&self) -> T {
        self.jitter
    }

    /// Relative Frobenius error of the implied covariance.
    pub fn factor_error(&self) -> T {
        self.factor_error
    }

    /// Circulant size when embedding succeeded.
    pub fn embedding_size(&self) -> Option<usize> {
        match &self.factor {
            Factor::Circulant(f) => Some(f.embedding_size),
            Factor::Dense(_) => None,
        }
    }

    fn draw_with(&self, rng: &mut SimRng) -> Vec<T> {
        self.factor.draw(rng)
    }

    /// Turns an unconditional draw into one conditioned on `X_0 > u`, using
    /// the independence of `X_t - R(t)/R(0) X_0` from `X_0`.
    fn condition(&self, values: &mut [T], u: T, rng: &mut SimRng) {
        let origin = self.grid.origin_index();
        let xi = T::lit(draw_truncated_normal(self.kernel.r0().as_f64().sqrt(), u.as_f64(), rng));
        let shift = xi - values[origin];
        for (v, &w) in values.iter_mut().zip(&self.regression) {
            *v = *v + w * shift;
        }
        values[origin] = xi;
    }
}

/// Sampled process on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub seed: Seed,
    pub method: Option<SynthesisMethod>,
}

impl<T: Real> Path<T> {
    /// Creates a path from explicit values (deterministic inputs, tests).
    pub fn from_values(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!("{} values for a grid of {} points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("path values must be finite"));
        }
        Ok(Path { grid, values, seed: Seed::new(0), method: None })
    }

    /// Samples `f(t)` at every grid point.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.times().map(f).collect();
        Self::from_values(grid, values)
    }

    pub fn origin_index(&self) -> usize {
        self.grid.origin_index()
    }

    pub fn at_origin(&self) -> T {
        self.values[self.origin_index()]
    }
}

/// Zero-mean stationary path with covariance `R(t_i - t_j)`.
pub fn sample_unconditional<T: Real>(plan: &SamplerPlan<T>, seed: Seed) -> Path<T> {
    let mut rng = seed.rng();
    Path { grid: plan.grid, values: plan.draw_with(&mut rng), seed, method: Some(plan.method()) }
}

/// Exact draw of the path law given `X_0 > u`.
pub fn sample_conditional_exceedance<T: Real>(plan: &SamplerPlan<T>, u: T, seed: Seed) -> Path<T> {
    let mut rng = seed.rng();
    let mut values = plan.draw_with(&mut rng);
    plan.condition(&mut values, u, &mut rng);
    Path { grid: plan.grid, values, seed, method: Some(plan.method()) }
}

/// Standard normal upper tail, `1 - Phi(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Switch point (in standard deviations) between inversion and rejection.
pub const TAIL_REJECTION_SWITCH: f64 = 2.0;

/// `N(0, sigma^2)` conditioned on exceeding `u`.
///
/// Inversion below `u / sigma = 2`; above, rejection from a shifted exponential
/// with the optimal rate `(a + sqrt(a^2 + 4)) / 2`, whose acceptance rate tends
/// to one as the threshold grows.
pub fn draw_truncated_normal<R: Rng + ?Sized>(sigma: f64, u: f64, rng: &mut R) -> f64 {
    let a = u / sigma;
    if a <= TAIL_REJECTION_SWITCH {
        // Phi^-1(Phi(a) + U * (1 - Phi(a))) written through the upper tail
        let tail = normal_sf(a);
        let v: f64 = rng.sample(Open01);
        let p = tail * v;
        sigma * std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
    } else {
        let rate = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let e: f64 = rng.sample(Open01);
            let z = a - e.ln() / rate;
            let accept: f64 = rng.sample(Open01);
            if accept <= (-0.5 * (z - rate) * (z - rate)).exp() {
                return sigma * z;
            }
        }
    }
}

/// One draw of `N(0, variance)` given that it exceeds `u`.
pub fn sample_truncated_normal<T: Real>(variance: T, u: T, seed: Seed) -> Result<T> {
    if !(variance > T::zero()) {
        return Err(domain(format!("variance must be positive, got {variance}")));
    }
    let mut rng = seed.rng();
    Ok(T::lit(draw_truncated_normal(variance.as_f64().sqrt(), u.as_f64(), &mut rng)))
}

/// Central difference `(X_h - X_-h) / 2h` at the origin.
pub fn path_derivative_at_zero<T: Real>(p: &Path<T>) -> Result<T> {
    let o = p.origin_index();
    if o == 0 || o + 1 >= p.values.len() {
        return Err(domain("origin sits on the grid boundary"));
    }
    Ok((p.values[o + 1] - p.values[o - 1]) / (T::lit(2.0) * p.grid.step()))
}
