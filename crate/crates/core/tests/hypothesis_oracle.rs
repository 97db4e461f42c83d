//! Shapiro-Wilk and t-test results against scipy.stats reference values
//! (see tools/oracles/gen_tests.py).

use geoacc_core::hypothesis::{shapiro_wilk, t_test_mu0};
use serde::Deserialize;

#[derive(Deserialize)]
struct SwCase {
    sample: Vec<f64>,
    w: f64,
    p: f64,
}

#[derive(Deserialize)]
struct TCase {
    sample: Vec<f64>,
    t: f64,
    p: f64,
}

#[test]
fn shapiro_wilk_matches_reference() {
    let cases: Vec<SwCase> = serde_json::from_str(include_str!("data/shapiro_oracle.json")).unwrap();
    assert_eq!(cases.len(), 50);
    let mut worst_w: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for c in &cases {
        let r = shapiro_wilk(&c.sample, 0.05).unwrap();
        worst_w = worst_w.max((r.statistic - c.w).abs());
        worst_p = worst_p.max((r.p_value - c.p).abs());
        assert!(
            (r.statistic - c.w).abs() < 1e-6,
            "n = {}: W {} vs {}",
            c.sample.len(),
            r.statistic,
            c.w
        );
        assert!(
            (r.p_value - c.p).abs() < 1e-4,
            "n = {}: p {} vs {}",
            c.sample.len(),
            r.p_value,
            c.p
        );
    }
    eprintln!("shapiro-wilk worst |dW| = {worst_w:e}, worst |dp| = {worst_p:e}");
}

#[test]
fn t_test_matches_reference() {
    let cases: Vec<TCase> = serde_json::from_str(include_str!("data/ttest_oracle.json")).unwrap();
    assert_eq!(cases.len(), 50);
    for c in &cases {
        let r = t_test_mu0(&c.sample, 0.05).unwrap();
        assert!((r.statistic - c.t).abs() < 1e-9 * c.t.abs().max(1.0));
        assert!((r.p_value - c.p).abs() < 1e-9, "p {} vs {}", r.p_value, c.p);
    }
}
