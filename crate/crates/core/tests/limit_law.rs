mod common;

use common::{mean_se, var_se, within};
use excursion_core::{c2_limit_cdf, c2_limit_quantile, c2_limit_sample, C2LimitParams, Seed};
use rand::Rng;

#[test]
fn cdf_reaches_one() {
    for (r0, r2) in [(1.0, -2.0), (2.0, -0.5), (0.3, -7.0)] {
        let p = C2LimitParams::new(r0, r2).unwrap();
        assert_eq!(c2_limit_cdf(&p, 0.0), 0.0);
        assert!(c2_limit_cdf(&p, 100.0 * p.scale()) >= 1.0 - 1e-10);
    }
}

#[test]
fn sampler_linear_in_r0() {
    let a = C2LimitParams::new(1.0, -2.0).unwrap();
    let b = C2LimitParams::new(2.0, -2.0).unwrap();
    for i in 0..100 {
        let s = Seed::new(6).substream(i);
        let (x, y): (f64, f64) = (c2_limit_sample(&a, s), c2_limit_sample(&b, s));
        assert!(x > 0.0);
        assert!((y - 2.0 * x).abs() <= 1e-12 * y);
    }
}

#[test]
fn sample_mean_stable_across_batches() {
    let p = C2LimitParams::new(1.0, -2.0).unwrap();
    assert!((p.scale() - 2f64.sqrt()).abs() < 1e-12);
    let batch = |seed: u64| -> Vec<f64> { (0..20_000).map(|i| c2_limit_sample(&p, Seed::new(seed).substream(i))).collect() };
    let (ma, sa) = mean_se(&batch(1));
    let (mb, sb) = mean_se(&batch(2));
    assert!(within(ma, mb, sa.hypot(sb), 3.0), "{ma} {mb}");
}

#[test]
fn median_matches_sampler() {
    let p = C2LimitParams::new(1.0, -2.0).unwrap();
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n).map(|i| c2_limit_sample(&p, Seed::new(21).substream(i))).collect();
    let median = |v: &mut Vec<f64>| {
        let mid = v.len() / 2;
        *v.select_nth_unstable_by(mid, f64::total_cmp).1
    };
    let empirical = median(&mut draws.clone());
    let mut rng = Seed::new(22).rng();
    let boot: Vec<f64> = (0..40)
        .map(|_| {
            let mut b: Vec<f64> = (0..n).map(|_| draws[rng.random_range(0..n as usize)]).collect();
            median(&mut b)
        })
        .collect();
    let se = var_se(&boot).0.sqrt();
    let q = c2_limit_quantile(&p, 0.5).unwrap();
    assert!(within(q, empirical, se, 3.0), "quantile {q} median {empirical} se {se}");
}

#[test]
fn quantiles_monotone() {
    let p = C2LimitParams::new(1.0, -2.0).unwrap();
    let qs: Vec<f64> = (1..100).map(|i| c2_limit_quantile(&p, i as f64 / 100.0).unwrap()).collect();
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    assert!(c2_limit_quantile(&p, 1.0).is_err());
}
