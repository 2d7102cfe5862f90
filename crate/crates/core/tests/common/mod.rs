#![allow(dead_code)]

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample mean and its standard error.
pub fn mean_se(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    let n = x.len() as f64;
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Sample variance and the standard error of its estimate.
pub fn var_se(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    let sq: Vec<f64> = x.iter().map(|v| (v - m).powi(2)).collect();
    mean_se(&sq)
}

/// Sample covariance of paired draws and its standard error.
pub fn cov_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let prod: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    mean_se(&prod)
}

pub fn within(value: f64, target: f64, se: f64, k: f64) -> bool {
    (value - target).abs() <= k * se
}
