//! Empirical distributions and the two-sided Kolmogorov-Smirnov and
//! Wasserstein-1 distances used to compare excursion lengths with limit laws.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Minimum sample size accepted by the KS routines.
pub const KS_MIN_SAMPLE: usize = 8;

/// Sorted finite observations plus the number of censored replicates dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet<T> {
    values: Vec<T>,
    pub n_censored: usize,
    pub master_seed: u64,
}

impl<T: Real> SampleSet<T> {
    pub fn new(mut values: Vec<T>, n_censored: usize, master_seed: u64) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("sample values must be finite"));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(SampleSet { values, n_censored, master_seed })
    }

    pub fn from_values(values: Vec<T>) -> Result<Self> {
        Self::new(values, 0, 0)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replicates attempted, censored ones included.
    pub fn total(&self) -> usize {
        self.values.len() + self.n_censored
    }

    pub fn censor_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.n_censored as f64 / self.total() as f64
        }
    }

    /// Multiplies every value by `c > 0`.
    pub fn scaled(&self, c: T) -> Self {
        SampleSet { values: self.values.iter().map(|&v| v * c).collect(), ..*self }
    }

    /// Linearly interpolated quantile (`(n - 1) p` convention).
    pub fn quantile(&self, p: T) -> Result<T> {
        if self.values.is_empty() {
            return Err(Error::EmptySample { needed: 1, got: 0 });
        }
        if !(p >= T::zero() && p <= T::one()) {
            return Err(domain(format!("quantile level {p} outside [0, 1]")));
        }
        let h = p * T::from_usize_lossy(self.values.len() - 1);
        let lo = h.floor().as_f64() as usize;
        let hi = (lo + 1).min(self.values.len() - 1);
        let frac = h - T::from_usize_lossy(lo);
        Ok(self.values[lo] + frac * (self.values[hi] - self.values[lo]))
    }

    pub fn median(&self) -> Result<T> {
        self.quantile(T::lit(0.5))
    }

    pub fn mean(&self) -> Result<T> {
        if self.values.is_empty() {
            return Err(Error::EmptySample { needed: 1, got: 0 });
        }
        let s = self.values.iter().fold(T::zero(), |a, &v| a + v);
        Ok(s / T::from_usize_lossy(self.values.len()))
    }
}

impl<T: Copy> SampleSet<T> {
    fn with_values(&self, values: Vec<T>) -> Self {
        SampleSet { values, n_censored: self.n_censored, master_seed: self.master_seed }
    }
}

impl<T: Real> SampleSet<T> {
    /// Widens to `f64`, preserving order.
    pub fn to_f64(&self) -> SampleSet<f64> {
        SampleSet { values: self.values.iter().map(|v| v.as_f64()).collect(), n_censored: self.n_censored, master_seed: self.master_seed }
    }

    /// Keeps values for which `keep` holds.
    pub fn filtered(&self, keep: impl Fn(T) -> bool) -> Self {
        self.with_values(self.values.iter().copied().filter(|&v| keep(v)).collect())
    }
}

/// Fraction of observations `<= x`.
pub fn ecdf<T: Real>(s: &SampleSet<T>, x: T) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySample { needed: 1, got: 0 });
    }
    let k = s.values.partition_point(|&v| v <= x);
    Ok(k as f64 / s.len() as f64)
}

/// Kolmogorov distribution survival function `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form, fast for small lambda
        let c = -PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=6).map(|k| ((2 * k - 1) as f64).powi(2) * c).map(f64::exp).sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub stat: f64,
    pub pvalue: f64,
}

/// Two-sided one-sample KS distance `sup |F_n - F|`, checked at both
/// envelopes of every jump.
pub fn ks_statistic<T: Real>(s: &SampleSet<T>, cdf: impl Fn(T) -> f64) -> Result<f64> {
    let n = s.len();
    if n == 0 {
        return Err(Error::EmptySample { needed: 1, got: 0 });
    }
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        // ties step the ECDF once
        let x = s.values[i];
        let mut j = i;
        while j < n && s.values[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max(j as f64 / nf - f).max(f - i as f64 / nf);
        i = j;
    }
    Ok(d.clamp(0.0, 1.0))
}

/// One-sample KS test with asymptotic p-value at `sqrt(n) D`.
pub fn ks_one_sample<T: Real>(s: &SampleSet<T>, cdf: impl Fn(T) -> f64) -> Result<KsResult> {
    let n = s.len();
    if n < KS_MIN_SAMPLE {
        return Err(Error::EmptySample { needed: KS_MIN_SAMPLE, got: n });
    }
    let d = ks_statistic(s, cdf)?;
    Ok(KsResult { stat: d, pvalue: kolmogorov_sf((n as f64).sqrt() * d) })
}

/// Two-sample KS with effective size `n_a n_b / (n_a + n_b)`.
pub fn ks_two_sample<T: Real>(a: &SampleSet<T>, b: &SampleSet<T>) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLE {
            return Err(Error::EmptySample { needed: KS_MIN_SAMPLE, got: s.len() });
        }
    }
    let (na, nb) = (a.len(), b.len());
    let (va, vb) = (&a.values, &b.values);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = if va[i] <= vb[j] { va[i] } else { vb[j] };
        while i < na && va[i] <= x {
            i += 1;
        }
        while j < nb && vb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    if i < na || j < nb {
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let en = (na * nb) as f64 / (na + nb) as f64;
    Ok(KsResult { stat: d, pvalue: kolmogorov_sf(en.sqrt() * d) })
}

/// `int_0^1 |Q_a(p) - Q_b(p)| dp` for the empirical quantile functions. With
/// equal sizes this is the mean absolute difference of order statistics.
pub fn wasserstein1<T: Real>(a: &SampleSet<T>, b: &SampleSet<T>) -> Result<f64> {
    for s in [a, b] {
        if s.is_empty() {
            return Err(Error::EmptySample { needed: 1, got: 0 });
        }
    }
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0.0;
    let mut acc = 0.0;
    while i < na && j < nb {
        // next breakpoint: min((i+1)/na, (j+1)/nb), compared exactly
        let left = (i + 1) * nb;
        let right = (j + 1) * na;
        let next = left.min(right) as f64 / (na * nb) as f64;
        acc += (next - prev) * (a.values[i].as_f64() - b.values[j].as_f64()).abs();
        prev = next;
        if left <= right {
            i += 1;
        }
        if right <= left {
            j += 1;
        }
    }
    Ok(acc)
}
