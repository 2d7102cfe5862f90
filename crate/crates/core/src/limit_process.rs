//! Heavy-tail limit objects: two-sided fractional Brownian motion, the
//! drifted limit process `Y_t = sqrt(2 C) B(t) + r0 T - (C / r0) |t|^alpha`,
//! its normalized form `sqrt(2) B(t) + T - |t|^alpha`, and their zero-hitting
//! intervals.

use std::sync::OnceLock;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::excursion::first_passages;
use crate::gauss_sim::Path;
use crate::grid::Grid;
use crate::kernels::c_alpha;
use crate::linalg::{embed_circulant, factor_dense, standard_normals, CirculantFactor, LowerTriangular};
use crate::rng::{Seed, SimRng};
use crate::scalar::Real;

/// Grids up to this many points use a dense factor of the two-sided covariance.
pub const DENSE_FBM_MAX_POINTS: usize = 2049;
/// Window doublings attempted before a limit draw is declared censored.
pub const MAX_WINDOW_EXTENSIONS: u32 = 6;
pub const DEFAULT_LIMIT_STEP: f64 = 0.01;
pub const DEFAULT_LIMIT_HALF_WIDTH: f64 = 10.0;

/// `Cov(B(s), B(t)) = (|s|^a + |t|^a - |s - t|^a) / 2`.
pub fn fbm_covariance<T: Real>(alpha: T, s: T, t: T) -> T {
    T::lit(0.5) * (s.abs().powf(alpha) + t.abs().powf(alpha) - (s - t).abs().powf(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FbmMethod {
    /// Cholesky of the joint covariance at all non-zero grid times.
    Dense,
    /// Circulant embedding of fractional Gaussian noise, summed from the left
    /// edge and re-pinned at the origin.
    Increments,
}

#[derive(Debug, Clone)]
enum FbmFactor<T: Real> {
    Dense(LowerTriangular<T>),
    Increments(CirculantFactor<T>),
}

/// Exact two-sided fBm generator on a fixed grid.
#[derive(Debug, Clone)]
pub struct FbmGenerator<T: Real> {
    alpha: T,
    grid: Grid<T>,
    factor: FbmFactor<T>,
    factor_error: T,
}

impl<T: Real> FbmGenerator<T> {
    pub fn new(alpha: T, grid: &Grid<T>) -> Result<Self> {
        let method = if grid.len() <= DENSE_FBM_MAX_POINTS { FbmMethod::Dense } else { FbmMethod::Increments };
        Self::with_method(alpha, grid, method)
    }

    pub fn with_method(alpha: T, grid: &Grid<T>, method: FbmMethod) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::lit(2.0)) {
            return Err(domain(format!("fBm needs alpha in (0, 2), got {alpha}")));
        }
        let n = grid.len();
        let (factor, factor_error) = match method {
            FbmMethod::Dense => {
                let times: Vec<T> = grid.times().filter(|t| *t != T::zero()).collect();
                let m = times.len();
                let mut a = vec![T::zero(); m * m];
                for i in 0..m {
                    for j in 0..m {
                        a[i * m + j] = fbm_covariance(alpha, times[i], times[j]);
                    }
                }
                let scale = grid.half_width().powf(alpha);
                let f = factor_dense(&a, m, scale)?;
                (FbmFactor::Dense(f.lower), f.relative_error)
            }
            FbmMethod::Increments => {
                let h = grid.step().powf(alpha);
                let gamma = |k: usize| {
                    let k = T::from_usize_lossy(k);
                    let one = T::one();
                    T::lit(0.5) * h * ((k + one).powf(alpha) - T::lit(2.0) * k.powf(alpha) + (k - one).abs().powf(alpha))
                };
                let f = embed_circulant(n - 1, gamma)
                    .ok_or_else(|| Error::Synthesis("fractional Gaussian noise embedding failed".into()))?;
                let e = f.relative_error;
                (FbmFactor::Increments(f), e)
            }
        };
        Ok(FbmGenerator { alpha, grid: *grid, factor, factor_error })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn method(&self) -> FbmMethod {
        match self.factor {
            FbmFactor::Dense(_) => FbmMethod::Dense,
            FbmFactor::Increments(_) => FbmMethod::Increments,
        }
    }

    pub fn factor_error(&self) -> T {
        self.factor_error
    }

    fn draw_values(&self, rng: &mut SimRng) -> Vec<T> {
        let o = self.grid.origin_index();
        match &self.factor {
            FbmFactor::Dense(l) => {
                let mut v = l.mul_vec(&standard_normals(rng, l.dim()));
                v.insert(o, T::zero());
                v
            }
            FbmFactor::Increments(f) => {
                let inc = f.draw(rng);
                let mut v = Vec::with_capacity(inc.len() + 1);
                let mut acc = T::zero();
                v.push(acc);
                for d in inc {
                    acc = acc + d;
                    v.push(acc);
                }
                let pin = v[o];
                v.iter_mut().for_each(|x| *x = *x - pin);
                v[o] = T::zero();
                v
            }
        }
    }

    pub fn draw(&self, seed: Seed) -> FbmPath<T> {
        let mut rng = seed.rng();
        FbmPath { grid: self.grid, values: self.draw_values(&mut rng), alpha: self.alpha, seed }
    }
}

/// Two-sided fBm with Hurst index `alpha / 2`, pinned at `B(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub alpha: T,
    pub seed: Seed,
}

pub fn fbm_two_sided<T: Real>(alpha: T, grid: &Grid<T>, seed: Seed) -> Result<FbmPath<T>> {
    Ok(FbmGenerator::new(alpha, grid)?.draw(seed))
}

fn compose<T: Real>(alpha: T, fbm: &FbmPath<T>, t_star: T, noise: T, level: T, drift: T) -> Result<Path<T>> {
    if fbm.alpha != alpha {
        return Err(domain(format!("fBm built for alpha {} used with alpha {alpha}", fbm.alpha)));
    }
    if !(t_star > T::zero()) {
        return Err(domain(format!("exponential draw must be positive, got {t_star}")));
    }
    let values = fbm
        .grid
        .times()
        .zip(&fbm.values)
        .map(|(t, &b)| noise * b + level - drift * t.abs().powf(alpha))
        .collect();
    let mut path = Path::from_values(fbm.grid, values)?;
    path.values[fbm.grid.origin_index()] = level;
    path.seed = fbm.seed;
    Ok(path)
}

/// `Y_t = sqrt(2 C_alpha) B(t) + r0 t_star - (C_alpha / r0) |t|^alpha`.
pub fn limit_process_path<T: Real>(alpha: T, r0: T, fbm: &FbmPath<T>, t_star: T) -> Result<Path<T>> {
    if !(r0 > T::zero()) {
        return Err(domain(format!("r0 must be positive, got {r0}")));
    }
    let c = c_alpha(alpha)?;
    compose(alpha, fbm, t_star, (T::lit(2.0) * c).sqrt(), r0 * t_star, c / r0)
}

/// `sqrt(2) B(t) + t_star - |t|^alpha`.
pub fn tilde_process_path<T: Real>(alpha: T, fbm: &FbmPath<T>, t_star: T) -> Result<Path<T>> {
    compose(alpha, fbm, t_star, T::SQRT_2(), t_star, T::one())
}

/// Zero-hitting interval of a limit path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSample<T> {
    pub tau_star_minus: T,
    pub tau_star_plus: T,
    pub window_extensions: u32,
    pub censored: bool,
}

impl<T: Real> LimitSample<T> {
    pub fn length(&self) -> Option<T> {
        (!self.censored).then(|| self.tau_star_plus - self.tau_star_minus)
    }
}

/// First crossing of zero on each side, linearly interpolated.
pub fn limit_hitting_interval<T: Real>(y: &Path<T>) -> Result<LimitSample<T>> {
    let y0 = y.at_origin();
    if !(y0 > T::zero()) {
        return Err(Error::Precondition(format!("limit path starts at {y0} <= 0")));
    }
    let r = first_passages(y, T::zero());
    Ok(LimitSample {
        tau_star_minus: r.tau_minus,
        tau_star_plus: r.tau_plus,
        window_extensions: 0,
        censored: r.is_censored(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Normalization<T> {
    Limit { r0: T },
    Tilde,
}

/// Repeated draws of the limit hitting interval sharing cached factorizations.
///
/// A draw that does not hit zero inside the window is discarded and redrawn
/// on a window twice as wide, from substream `k` of the replicate seed for
/// the `k`-th extension.
#[derive(Debug)]
pub struct LimitSampler<T: Real> {
    alpha: T,
    norm: Normalization<T>,
    base: Grid<T>,
    levels: Vec<OnceLock<Result<FbmGenerator<T>>>>,
}

impl<T: Real> LimitSampler<T> {
    pub fn new(alpha: T, r0: T, grid: &Grid<T>) -> Result<Self> {
        if !(r0 > T::zero()) {
            return Err(domain(format!("r0 must be positive, got {r0}")));
        }
        Self::build(alpha, Normalization::Limit { r0 }, grid)
    }

    /// Sampler for the normalized process `sqrt(2) B(t) + T - |t|^alpha`.
    pub fn tilde(alpha: T, grid: &Grid<T>) -> Result<Self> {
        Self::build(alpha, Normalization::Tilde, grid)
    }

    fn build(alpha: T, norm: Normalization<T>, grid: &Grid<T>) -> Result<Self> {
        c_alpha(alpha)?;
        let levels = (0..=MAX_WINDOW_EXTENSIONS).map(|_| OnceLock::new()).collect();
        let s = LimitSampler { alpha, norm, base: *grid, levels };
        s.generator(0)?;
        Ok(s)
    }

    pub fn base_grid(&self) -> &Grid<T> {
        &self.base
    }

    pub fn generator(&self, extension: u32) -> Result<&FbmGenerator<T>> {
        self.levels[extension as usize]
            .get_or_init(|| FbmGenerator::new(self.alpha, &self.base.widened(1 << extension)))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn sample(&self, seed: Seed) -> Result<LimitSample<T>> {
        let mut last = None;
        for ext in 0..=MAX_WINDOW_EXTENSIONS {
            let gen = self.generator(ext)?;
            let stream = seed.substream(ext as u64);
            let mut rng = stream.rng();
            let t_star = T::lit(rng.sample::<f64, _>(Exp1));
            let fbm = FbmPath { grid: *gen.grid(), values: gen.draw_values(&mut rng), alpha: self.alpha, seed: stream };
            let path = match self.norm {
                Normalization::Limit { r0 } => limit_process_path(self.alpha, r0, &fbm, t_star)?,
                Normalization::Tilde => tilde_process_path(self.alpha, &fbm, t_star)?,
            };
            let mut hit = limit_hitting_interval(&path)?;
            hit.window_extensions = ext;
            if !hit.censored {
                return Ok(hit);
            }
            last = Some(hit);
        }
        Ok(last.expect("at least one attempt"))
    }
}

/// One draw of `(tau*^-, tau*^+)` for the limit process `Y`.
pub fn sample_limit_length<T: Real>(alpha: T, r0: T, grid: &Grid<T>, seed: Seed) -> Result<LimitSample<T>> {
    LimitSampler::new(alpha, r0, grid)?.sample(seed)
}
