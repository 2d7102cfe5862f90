//! Excursion interval around the origin, `(tau_u^-, tau_u^+)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gauss_sim::Path;
use crate::scalar::Real;

/// Crossing times of the excursion containing the origin.
///
/// A censored side carries the window edge as a bound: the true crossing
/// lies beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcursionResult<T> {
    pub tau_minus: T,
    pub tau_plus: T,
    pub censored_left: bool,
    pub censored_right: bool,
}

impl<T: Real> ExcursionResult<T> {
    pub fn is_censored(&self) -> bool {
        self.censored_left || self.censored_right
    }

    /// `tau_plus - tau_minus`, undefined when either side is censored.
    pub fn length(&self) -> Option<T> {
        (!self.is_censored()).then(|| self.tau_plus - self.tau_minus)
    }
}

/// Offset in `(0, 1]` of the level crossing between an above-level value
/// `from` and an at-or-below value `to`.
#[inline]
fn crossing_fraction<T: Real>(from: T, to: T, level: T) -> T {
    ((from - level) / (from - to)).min(T::one())
}

/// Linear-interpolated first passage to `level` on either side of the origin.
pub(crate) fn first_passages<T: Real>(p: &Path<T>, level: T) -> ExcursionResult<T> {
    let v = &p.values;
    let o = p.origin_index();
    let step = p.grid.step();
    let right = (o + 1..v.len()).find(|&j| v[j] <= level);
    let left = (0..o).rev().find(|&j| v[j] <= level);
    let (tau_plus, censored_right) = match right {
        Some(j) => (p.grid.time(j - 1) + step * crossing_fraction(v[j - 1], v[j], level), false),
        None => (p.grid.half_width(), true),
    };
    let (tau_minus, censored_left) = match left {
        Some(j) => (p.grid.time(j + 1) - step * crossing_fraction(v[j + 1], v[j], level), false),
        None => (-p.grid.half_width(), true),
    };
    ExcursionResult { tau_minus, tau_plus, censored_left, censored_right }
}

/// Excursion of `p` above `u` straddling the origin; a value exactly equal to
/// `u` counts as the crossing.
pub fn crossing_bounds<T: Real>(p: &Path<T>, u: T) -> Result<ExcursionResult<T>> {
    let x0 = p.at_origin();
    if !(x0 > u) {
        return Err(Error::Precondition(format!("path at origin {x0} does not exceed u = {u}")));
    }
    Ok(first_passages(p, u))
}

/// Positive root of `u = x0 + tau x' + tau^2 x'' / 2`, the second-order Taylor
/// prediction of `tau_u^+`.
pub fn c2_root_predictor<T: Real>(x0: T, xprime0: T, xsecond: T, u: T) -> Result<T> {
    if !(xsecond < T::zero()) {
        return Err(domain(format!("curvature must be negative, got {xsecond}")));
    }
    if x0 < u {
        return Err(domain(format!("x0 = {x0} below threshold {u}")));
    }
    let disc = xprime0 * xprime0 - T::lit(2.0) * xsecond * (x0 - u);
    Ok(-(disc.sqrt() + xprime0) / xsecond)
}
