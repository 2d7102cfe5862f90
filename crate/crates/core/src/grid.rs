use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Uniform grid `t_i = (i - m) * step`, `i = 0..=2m`, symmetric about 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    step: T,
    per_side: usize,
}

impl<T: Real> Grid<T> {
    /// Grid with `floor(half_width / step)` points on each side of the origin.
    pub fn new(step: T, half_width: T) -> Result<Self> {
        if !(step > T::zero() && step.is_finite()) {
            return Err(domain(format!("grid step must be positive, got {step}")));
        }
        if !(half_width > T::zero() && half_width.is_finite()) {
            return Err(domain(format!("grid half width must be positive, got {half_width}")));
        }
        // absorb roundoff in ratios such as 0.5 / 0.01
        let ratio = (half_width / step).as_f64();
        let per_side = (ratio * (1.0 + 1e-9)).floor();
        if per_side > (u32::MAX as f64) {
            return Err(domain("grid too large"));
        }
        Self::with_points_per_side(step, per_side as usize)
    }

    pub fn with_points_per_side(step: T, per_side: usize) -> Result<Self> {
        if !(step > T::zero() && step.is_finite()) {
            return Err(domain(format!("grid step must be positive, got {step}")));
        }
        if per_side == 0 {
            return Err(domain("grid needs at least 3 points"));
        }
        Ok(Grid { step, per_side })
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn points_per_side(&self) -> usize {
        self.per_side
    }

    pub fn len(&self) -> usize {
        2 * self.per_side + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance from the origin to the outermost grid point.
    pub fn half_width(&self) -> T {
        self.step * T::from_usize_lossy(self.per_side)
    }

    pub fn origin_index(&self) -> usize {
        self.per_side
    }

    pub fn time(&self, i: usize) -> T {
        let offset = i as f64 - self.per_side as f64;
        self.step * T::lit(offset)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    /// Same step, `factor` times the extent.
    pub fn widened(&self, factor: usize) -> Self {
        Grid { step: self.step, per_side: self.per_side * factor }
    }

    /// Index of the grid point nearest to `t`, if inside the window.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let k = (t / self.step).round().as_f64() + self.per_side as f64;
        (k >= 0.0 && k < self.len() as f64).then_some(k as usize)
    }
}
