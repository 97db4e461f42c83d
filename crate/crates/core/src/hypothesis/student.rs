use super::{check_alpha, Method, TestReport};
use crate::error::{domain, Error, Result};
use crate::specfn::student_t_sf;

/// One-sample t-test of `H0: mean(y) = 0`.
///
/// `T = ȳ √n / S` with `S²` the `n - 1` denominator variance; the two-sided
/// p-value is `2 P(t_{n-1} > |T|)`.
pub fn t_test_mu0(y: &[f64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let n = y.len();
    if n < 2 {
        return domain(format!("t-test needs at least 2 values, got {n}"));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return domain(format!("t-test got non-finite value {bad}"));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::Degenerate(
            "log-ratios have zero variance (every forecast is off by the same factor)".into(),
        ));
    }
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let t = mean * nf.sqrt() / var.sqrt();
    let df = n - 1;
    let p = 2.0 * student_t_sf(t.abs(), df as f64)?;
    Ok(TestReport::new(t, p.min(1.0), alpha, Method::StudentT { df }))
}
