//! Covariance kernels and the spectral-tail constants of the heavy-tail regime.
//!
//! The built-in family is `R(t) = r0 * exp(-|t|^alpha)`, `0 < alpha <= 2`
//! (the characteristic function of a symmetric alpha-stable law, scaled by
//! `r0`). Its spectral measure has total mass `r0`; for `alpha < 2` the tail
//! behaves like `r0 / C_alpha * x^-alpha`, which is the form used throughout
//! in place of the exact measure.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelFamily {
    ExpPower,
}

/// Stationary covariance kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel<T> {
    family: KernelFamily,
    alpha: T,
    r0: T,
}

/// Builds `R(t) = r0 * exp(-|t|^alpha)`.
pub fn make_kernel<T: Real>(alpha: T, r0: T) -> Result<Kernel<T>> {
    if !(alpha > T::zero() && alpha <= T::lit(2.0)) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(r0 > T::zero() && r0.is_finite()) {
        return Err(domain(format!("variance r0 must be positive, got {r0}")));
    }
    Ok(Kernel { family: KernelFamily::ExpPower, alpha, r0 })
}

impl<T: Real> Kernel<T> {
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `R(0)`, the marginal variance.
    pub fn r0(&self) -> T {
        self.r0
    }

    /// `R(t)`.
    pub fn value(&self, t: T) -> T {
        match self.family {
            KernelFamily::ExpPower => self.r0 * (-self.abs_pow(t)).exp(),
        }
    }

    /// `R(0) - R(t)`, evaluated without cancellation for small `|t|`.
    pub fn increment(&self, t: T) -> T {
        match self.family {
            KernelFamily::ExpPower => -self.r0 * (-self.abs_pow(t)).exp_m1(),
        }
    }

    /// Finite second spectral moment. Only the Gaussian member qualifies.
    pub fn is_c2(&self) -> bool {
        self.alpha == T::lit(2.0)
    }

    pub fn is_heavy_tail(&self) -> bool {
        self.alpha < T::lit(2.0)
    }

    pub fn spectral_tail(&self) -> Result<SpectralTail<T>> {
        if !self.is_heavy_tail() {
            return Err(Error::NotHeavyTail { alpha: self.alpha.as_f64() });
        }
        Ok(SpectralTail { c_alpha: c_alpha(self.alpha)?, alpha: self.alpha, r0: self.r0 })
    }

    fn abs_pow(&self, t: T) -> T {
        let a = t.abs();
        if self.is_c2() {
            a * a
        } else {
            a.powf(self.alpha)
        }
    }
}

/// `R''(0)`; only defined when the kernel is C².
pub fn second_derivative_at_zero<T: Real>(k: &Kernel<T>) -> Result<T> {
    if !k.is_c2() {
        return Err(Error::NotC2 { alpha: k.alpha.as_f64() });
    }
    Ok(-T::lit(2.0) * k.r0)
}

/// `C_alpha = pi / (Gamma(alpha) * sin(pi * alpha / 2))`, `0 < alpha < 2`.
pub fn c_alpha<T: Real>(alpha: T) -> Result<T> {
    let a = alpha.as_f64();
    if !(a > 0.0 && a < 2.0) {
        return Err(domain(format!("C_alpha needs alpha in (0, 2), got {a}")));
    }
    let pi = std::f64::consts::PI;
    Ok(T::lit(pi / (statrs::function::gamma::gamma(a) * (pi * a / 2.0).sin())))
}

/// Power-law spectral tail `x -> r0 / C_alpha * x^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTail<T> {
    c_alpha: T,
    alpha: T,
    r0: T,
}

impl<T: Real> SpectralTail<T> {
    pub fn c_alpha(&self) -> T {
        self.c_alpha
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Tail mass `mu([x, inf))`.
    pub fn at(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(domain(format!("spectral tail needs x > 0, got {x}")));
        }
        Ok(self.r0 / self.c_alpha * x.powf(-self.alpha))
    }

    /// Generalized inverse `h(y) = inf { x >= 0 : mu([x, inf)) <= y }`.
    pub fn inverse(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Err(domain(format!("tail inverse needs y > 0, got {y}")));
        }
        Ok((self.r0 / (self.c_alpha * y)).powf(self.alpha.recip()))
    }
}

/// `mu([x, inf))` for a heavy-tailed kernel.
pub fn spectral_tail<T: Real>(k: &Kernel<T>, x: T) -> Result<T> {
    k.spectral_tail()?.at(x)
}

/// Excursion time scale `1 / h(u^-2) = (C_alpha / (r0 u^2))^(1/alpha)`.
pub fn delta_u<T: Real>(k: &Kernel<T>, u: T) -> Result<T> {
    let tail = k.spectral_tail()?;
    if !(u > T::zero()) {
        return Err(domain(format!("threshold u must be positive, got {u}")));
    }
    Ok(tail.inverse((u * u).recip())?.recip())
}

/// `(R(0) - R(t)) / (C_alpha * mu([1/t, inf)))`, which tends to 1 as `t -> 0`.
pub fn pitman_ratio<T: Real>(k: &Kernel<T>, t: T) -> Result<T> {
    let tail = k.spectral_tail()?;
    if !(t > T::zero()) {
        return Err(domain(format!("pitman ratio needs t > 0, got {t}")));
    }
    Ok(k.increment(t) / (tail.c_alpha * tail.at(t.recip())?))
}
