use std::path::Path;
use std::process::{Command, Output};

fn excursion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_excursion")).args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    text.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn limit_cdf_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cdf.csv");
    let o = excursion(&["limit-cdf", "--range", "0:10:0.01", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert_eq!(rows[0], ["x", "cdf"]);
    let values: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(values.len(), 1001);
    assert_eq!(values[0], 0.0);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
    assert!(*values.last().unwrap() >= 0.999);
}

#[test]
fn limit_cdf_json() {
    let o = excursion(&["limit-cdf", "--range", "0:1:0.5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("cdf"));
}

#[test]
fn configuration_errors_exit_2() {
    let cases: [&[&str]; 6] = [
        &["verify-c2", "--alpha", "1", "--n", "200"],
        &["verify-ht", "--alpha", "2", "--n", "200"],
        &["verify-ht", "--alpha", "0", "--n", "200"],
        &["limit-cdf", "--range", "1:0:0.1"],
        &["diagnostics", "--alpha", "2"],
        &["verify-c2", "--u", "-1", "--n", "200"],
    ];
    for args in cases {
        let o = excursion(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let o = excursion(&["verify-c2", "--n", "300", "--seed", "7", "--ks-threshold", "1", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        v.as_object_mut().unwrap().remove("runtime_seconds");
        reports.push(v.to_string());
        assert!(dir.path().join(name.replace(".json", ".quantiles.csv")).exists());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn failing_acceptance_exits_1() {
    let o = excursion(&["verify-c2", "--n", "200", "--ks-threshold", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn censor_budget_exits_3() {
    let o = excursion(&["verify-c2", "--n", "200", "--window-factor", "0.5"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn heavy_tail_reports_delta_u() {
    let o = excursion(&["verify-ht", "--n", "100", "--window-factor", "20", "--ks-threshold", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = v["delta_u"].as_f64().unwrap();
    assert!((d - std::f64::consts::PI / 100.0).abs() < 1e-9, "{d}");
}

#[test]
fn sample_paths_exceed_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("paths.csv");
    let o = excursion(&["sample-paths", "--n", "3", "--u", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert_eq!(rows[0], ["t", "value", "replicate"]);
    // step 0.01/u over half width 20/u: 2000 points per side plus the origin
    assert_eq!(rows.len() - 1, 3 * 4001);
    let origin: Vec<f64> = rows[1..].iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0).map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(origin.len(), 3);
    assert!(origin.iter().all(|&x| x > 4.0));
}

#[test]
fn diagnostics_pitman_ratio_approaches_one() {
    let o = excursion(&["diagnostics", "--n", "200", "--window-factor", "20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let pitman: Vec<f64> =
        text.lines().filter(|l| l.starts_with("pitman_ratio")).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(pitman.len(), 25);
    assert!((pitman.last().unwrap() - 1.0).abs() < 1e-2);
    assert_eq!(text.lines().filter(|l| l.starts_with("residual_covariance")).count(), 3);
}
