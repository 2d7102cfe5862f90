use excursion_core::verify::excursion_lengths;
use excursion_core::{
    build_sampler, c2_limit_sample, ks_one_sample, ks_two_sample, run_verification, C2LimitParams, SampleSet, Seed,
    VerificationConfig,
};
use rand::Rng;

#[test]
fn one_sample_ks_is_calibrated() {
    let passes = (0..100)
        .filter(|&r| {
            let mut rng = Seed::new(50).substream(r).rng();
            let s = SampleSet::from_values((0..10_000).map(|_| rng.random::<f64>()).collect()).unwrap();
            ks_one_sample(&s, |x: f64| x.clamp(0.0, 1.0)).unwrap().pvalue >= 0.01
        })
        .count();
    assert!(passes >= 98, "{passes}/100");
}

#[test]
fn two_sample_ks_is_calibrated() {
    let p = C2LimitParams::new(1.0, -2.0).unwrap();
    let batch = |seed: Seed| SampleSet::from_values((0..10_000).map(|i| c2_limit_sample(&p, seed.substream(i))).collect()).unwrap();
    let passes = (0..100)
        .filter(|&r| {
            let s = Seed::new(60).substream(r);
            ks_two_sample(&batch(s.substream(0)), &batch(s.substream(1))).unwrap().pvalue >= 0.01
        })
        .count();
    assert!(passes >= 98, "{passes}/100");
}

#[test]
fn c2_scaled_lengths_stable_under_doubling_u() {
    let scaled = |u: f64, seed: u64| {
        let cfg = VerificationConfig::c2(u, 5000, seed);
        let plan = build_sampler(&cfg.kernel::<f64>().unwrap(), &cfg.grid().unwrap()).unwrap();
        excursion_lengths(&plan, u, 5000, Seed::new(seed)).unwrap().scaled(u)
    };
    let ks = ks_two_sample(&scaled(6.0, 1), &scaled(12.0, 2)).unwrap();
    assert!(ks.stat <= 0.05, "{ks:?}");
}

#[test]
fn reports_are_reproducible() {
    let cfg = VerificationConfig::heavy_tail(1.0, 10.0, 200, 77);
    let a = run_verification::<f64>(&cfg).unwrap().without_runtime();
    let b = run_verification::<f64>(&cfg).unwrap().without_runtime();
    assert_eq!(a, b);
    assert_eq!(a.schema_version, 1);
}

#[test]
fn empty_run_is_rejected() {
    assert!(run_verification::<f64>(&VerificationConfig::c2(6.0, 0, 1)).is_err());
}
