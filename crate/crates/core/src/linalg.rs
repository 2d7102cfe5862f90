//! Exact Gaussian factorizations: circulant embedding for stationary
//! sequences and jittered Cholesky for everything else.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest power-of-two multiple applied to the minimal circulant embedding.
pub const MAX_EMBEDDING_DOUBLINGS: u32 = 6;
/// Negative circulant eigenvalues down to this fraction of the largest are roundoff.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-12;
/// Relative Frobenius error a factor may have against its target covariance.
pub const FACTOR_TOLERANCE: f64 = 1e-8;
/// Dense fallback jitter ladder, as fractions of the variance scale.
pub const JITTER_START: f64 = 1e-14;
pub const JITTER_MAX: f64 = 1e-10;

/// Tolerances tighten to the f64 values and loosen to a few hundred ulps for f32.
pub(crate) fn precision_floor<T: Real>(tol: f64) -> T {
    T::lit(tol).max(T::lit(256.0) * T::epsilon())
}

/// Lower-triangular factor stored row-major and packed.
#[derive(Debug, Clone)]
pub struct LowerTriangular<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> LowerTriangular<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, i: usize) -> &[T] {
        let start = i * (i + 1) / 2;
        &self.data[start..start + i + 1]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if j > i {
            T::zero()
        } else {
            self.row(i)[j]
        }
    }

    /// `L z`.
    pub fn mul_vec(&self, z: &[T]) -> Vec<T> {
        assert_eq!(z.len(), self.n);
        (0..self.n)
            .map(|i| dot(self.row(i), &z[..=i]))
            .collect()
    }

    /// `||L L^T - A||_F / ||A||_F` for a symmetric `A` given in row-major form.
    pub fn relative_error(&self, a: &[T]) -> T {
        let n = self.n;
        let mut err = T::zero();
        let mut norm = T::zero();
        for i in 0..n {
            let ri = self.row(i);
            for j in 0..=i {
                let rj = self.row(j);
                let prod = dot(&ri[..=j], rj);
                let target = a[i * n + j];
                let w = if i == j { T::one() } else { T::lit(2.0) };
                err = err + w * (prod - target) * (prod - target);
                norm = norm + w * target * target;
            }
        }
        (err / norm).sqrt()
    }
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Plain Cholesky of a symmetric matrix plus `jitter` on the diagonal.
pub fn cholesky<T: Real>(a: &[T], n: usize, jitter: T) -> Option<LowerTriangular<T>> {
    assert_eq!(a.len(), n * n);
    let mut data = vec![T::zero(); n * (n + 1) / 2];
    for i in 0..n {
        let ri = i * (i + 1) / 2;
        for j in 0..=i {
            let rj = j * (j + 1) / 2;
            let s = dot(&data[ri..ri + j], &data[rj..rj + j]);
            if i == j {
                let d = a[i * n + i] + jitter - s;
                if !(d > T::zero()) || !d.is_finite() {
                    return None;
                }
                data[ri + i] = d.sqrt();
            } else {
                data[ri + j] = (a[i * n + j] - s) / data[rj + j];
            }
        }
    }
    Some(LowerTriangular { n, data })
}

/// Factorization that passed the Frobenius check.
#[derive(Debug, Clone)]
pub struct DenseFactor<T> {
    pub lower: LowerTriangular<T>,
    pub jitter: T,
    pub relative_error: T,
}

/// Cholesky with the jitter ladder 0, 1e-14, ..., 1e-10 (times `scale`).
pub fn factor_dense<T: Real>(a: &[T], n: usize, scale: T) -> Result<DenseFactor<T>> {
    let tol = precision_floor::<T>(FACTOR_TOLERANCE);
    let jitter_cap = precision_floor::<T>(JITTER_MAX);
    let mut ladder = vec![T::zero()];
    let mut j = T::lit(JITTER_START);
    while j <= jitter_cap * T::lit(1.000001) {
        ladder.push(j);
        j = j * T::lit(10.0);
    }
    let mut last_err = None;
    for rel in ladder {
        let jitter = rel * scale;
        if let Some(lower) = cholesky(a, n, jitter) {
            let relative_error = lower.relative_error(a);
            if relative_error <= tol {
                return Ok(DenseFactor { lower, jitter, relative_error });
            }
            last_err = Some(relative_error);
        }
    }
    Err(Error::Synthesis(match last_err {
        Some(e) => format!("dense factor relative error {e} exceeds {tol}"),
        None => format!("matrix of size {n} not positive definite up to jitter {}", jitter_cap * scale),
    }))
}

/// Circulant embedding of a stationary covariance sequence of length `n`.
#[derive(Clone)]
pub struct CirculantFactor<T: Real> {
    n: usize,
    /// `sqrt(lambda_k / M)` for every embedding frequency.
    scaled_root: Vec<T>,
    fft: Arc<dyn Fft<T>>,
    pub embedding_size: usize,
    pub min_eigenvalue_ratio: T,
    pub relative_error: T,
}

impl<T: Real> std::fmt::Debug for CirculantFactor<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantFactor")
            .field("n", &self.n)
            .field("embedding_size", &self.embedding_size)
            .field("min_eigenvalue_ratio", &self.min_eigenvalue_ratio)
            .field("relative_error", &self.relative_error)
            .finish()
    }
}

/// Searches embeddings `M = 2^j * next_pow2(2(n-1))`, `j <= 6`, for one whose
/// eigenvalues are non-negative up to roundoff. `cov(k)` is the covariance at lag
/// `k` grid steps and must be defined for all `k` up to `M / 2`.
pub fn embed_circulant<T: Real>(n: usize, cov: impl Fn(usize) -> T) -> Option<CirculantFactor<T>> {
    assert!(n >= 2);
    let base = (2 * (n - 1)).next_power_of_two();
    let eig_tol = precision_floor::<T>(EIGENVALUE_TOLERANCE);
    let err_tol = precision_floor::<T>(FACTOR_TOLERANCE);
    let mut planner = FftPlanner::new();
    for doubling in 0..=MAX_EMBEDDING_DOUBLINGS {
        let m = base << doubling;
        let fft = planner.plan_fft_forward(m);
        let mut spectrum: Vec<Complex<T>> =
            (0..m).map(|k| Complex::new(cov(k.min(m - k)), T::zero())).collect();
        fft.process(&mut spectrum);
        let max = spectrum.iter().fold(T::zero(), |a, c| a.max(c.re));
        let min = spectrum.iter().fold(T::infinity(), |a, c| a.min(c.re));
        if !(max > T::zero()) || min < -eig_tol * max {
            continue;
        }
        let clipped: Vec<T> = spectrum.iter().map(|c| c.re.max(T::zero())).collect();

        // Covariance actually produced after clipping: inverse transform of the spectrum.
        let mut implied: Vec<Complex<T>> = clipped.iter().map(|&l| Complex::new(l, T::zero())).collect();
        planner.plan_fft_inverse(m).process(&mut implied);
        let mf = T::from_usize_lossy(m);
        let (mut err, mut norm) = (T::zero(), T::zero());
        for (lag, value) in implied.iter().take(n).enumerate() {
            let weight = T::from_usize_lossy(if lag == 0 { n } else { 2 * (n - lag) });
            let target = cov(lag);
            let d = value.re / mf - target;
            err = err + weight * d * d;
            norm = norm + weight * target * target;
        }
        let relative_error = (err / norm).sqrt();
        if relative_error > err_tol {
            continue;
        }
        return Some(CirculantFactor {
            n,
            scaled_root: clipped.iter().map(|&l| (l / mf).sqrt()).collect(),
            fft,
            embedding_size: m,
            min_eigenvalue_ratio: min / max,
            relative_error,
        });
    }
    None
}

impl<T: Real> CirculantFactor<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// One exact draw of the length-`n` stationary sequence.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let mut buf: Vec<Complex<T>> = self
            .scaled_root
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(s * T::lit(re), s * T::lit(im))
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.n);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Draws `n` iid standard normals.
pub(crate) fn standard_normals<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect()
}
