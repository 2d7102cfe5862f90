//! Limit law of `u (tau_u^+ - tau_u^-)` for C² kernels:
//! `s * sqrt(Z^2 + 2 T)` with `s = 2 R(0) / sqrt(-R''(0))`, `Z` standard
//! normal and `T` standard exponential.
//!
//! Conditioning on `Z` and integrating the exponential tail gives
//! `P(s sqrt(Z^2 + 2T) <= x) = int_{-a}^{a} phi(z) (1 - exp(-(a^2 - z^2) / 2)) dz`,
//! `a = x / s`, which is evaluated by adaptive quadrature (in complementary
//! form, see [`c2_limit_sf`]).

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{domain, Result};
use crate::kernels::{second_derivative_at_zero, Kernel};
use crate::linalg::precision_floor;
use crate::quadrature::integrate;
use crate::rng::Seed;
use crate::scalar::Real;

pub const CDF_ABS_TOLERANCE: f64 = 1e-10;
pub const QUANTILE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C2LimitParams<T> {
    r0: T,
    r2: T,
    scale: T,
}

impl<T: Real> C2LimitParams<T> {
    pub fn new(r0: T, r2: T) -> Result<Self> {
        if !(r0 > T::zero()) {
            return Err(domain(format!("R(0) must be positive, got {r0}")));
        }
        if !(r2 < T::zero()) {
            return Err(domain(format!("R''(0) must be negative, got {r2}")));
        }
        Ok(C2LimitParams { r0, r2, scale: T::lit(2.0) * r0 / (-r2).sqrt() })
    }

    pub fn from_kernel(k: &Kernel<T>) -> Result<Self> {
        Self::new(k.r0(), second_derivative_at_zero(k)?)
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn r2(&self) -> T {
        self.r2
    }

    /// `2 R(0) / sqrt(-R''(0))`.
    pub fn scale(&self) -> T {
        self.scale
    }
}

pub fn c2_limit_cdf<T: Real>(params: &C2LimitParams<T>, x: T) -> T {
    if !(x > T::zero()) {
        return T::zero();
    }
    (T::one() - c2_limit_sf(params, x)).max(T::zero()).min(T::one())
}

/// `P(s sqrt(Z^2 + 2T) > x)`.
///
/// The same conditioning written for the complement,
/// `2 int_a^inf phi(z) dz + 2 int_0^a phi(z) exp(-(a^2 - z^2) / 2) dz`,
/// keeps relative accuracy deep in the tail so the CDF stays monotone.
pub fn c2_limit_sf<T: Real>(params: &C2LimitParams<T>, x: T) -> T {
    if !(x > T::zero()) {
        return T::one();
    }
    let a = x / params.scale;
    let half = T::lit(0.5);
    let inv_root_2pi = T::FRAC_1_SQRT_2() * T::FRAC_2_SQRT_PI() * half;
    let phi = |z: T| inv_root_2pi * (-half * z * z).exp();
    let level = (-half * a * a).exp();
    if level == T::zero() {
        return T::zero();
    }
    // errors relative to the size of the tail, capped by the absolute budget
    let tol = precision_floor::<T>(CDF_ABS_TOLERANCE).min(T::lit(1e-13) * level);
    let beyond = integrate(phi, a, a + T::lit(40.0), half * tol);
    let inside = integrate(|z: T| phi(z) * (-half * (a * a - z * z)).exp(), T::zero(), a, half * tol);
    (T::lit(2.0) * (beyond + inside)).max(T::zero()).min(T::one())
}

/// `scale * sqrt(Z^2 + 2T)`; the normal is drawn before the exponential.
pub fn draw_c2_limit<T: Real, R: Rng + ?Sized>(params: &C2LimitParams<T>, rng: &mut R) -> T {
    let z: f64 = rng.sample(StandardNormal);
    let t: f64 = rng.sample(Exp1);
    params.scale * T::lit((z * z + 2.0 * t).sqrt())
}

pub fn c2_limit_sample<T: Real>(params: &C2LimitParams<T>, seed: Seed) -> T {
    draw_c2_limit(params, &mut seed.rng())
}

/// Inverse of [`c2_limit_cdf`] by bisection.
pub fn c2_limit_quantile<T: Real>(params: &C2LimitParams<T>, p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("quantile level must lie in (0, 1), got {p}")));
    }
    let tol = precision_floor::<T>(QUANTILE_TOLERANCE);
    let mut lo = T::zero();
    let mut hi = params.scale;
    while c2_limit_cdf(params, hi) < p {
        lo = hi;
        hi = hi * T::lit(2.0);
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        let f = c2_limit_cdf(params, mid);
        if f == p || hi - lo <= T::lit(4.0) * T::epsilon() * hi {
            debug_assert!((f - p).abs() <= tol);
            return Ok(mid);
        }
        if f < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(T::lit(0.5) * (lo + hi))
}
