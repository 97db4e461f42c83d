use super::{check_alpha, Method, TestReport};
use crate::error::{domain, Result};
use crate::specfn::ln_gamma_unchecked;

/// Largest `n` handled by exact integer arithmetic.
const EXACT_MAX_N: u64 = 64;

/// Two-sided sign-test p-value for `b` successes out of `n` under
/// `Binomial(n, 1/2)`: `2 P(B >= b)` above the centre, `2 P(B <= b)` below
/// it, and 1 at the centre. Capped at 1.
pub fn sign_test_p_value(n: u64, b: u64) -> Result<f64> {
    if b > n {
        return domain(format!("count {b} exceeds n = {n}"));
    }
    if n <= EXACT_MAX_N {
        let exact = sign_test_p_value_exact(n, b)?;
        debug_assert!(
            (exact - sign_test_p_value_log_space(n, b)?).abs() <= 1e-11 * exact.max(1e-300),
            "log-space sign test disagrees with integer enumeration at n={n}, b={b}"
        );
        return Ok(exact);
    }
    sign_test_p_value_log_space(n, b)
}

/// Upper tail index: the two-sided p-value equals `2 P(B >= k)`.
fn tail_start(n: u64, b: u64) -> Option<u64> {
    match (2 * b).cmp(&n) {
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(b),
        std::cmp::Ordering::Less => Some(n - b),
    }
}

/// Integer enumeration: `Σ C(n, x) / 2^{n-1}` over the tail, for `n <= 64`.
pub fn sign_test_p_value_exact(n: u64, b: u64) -> Result<f64> {
    if n > EXACT_MAX_N || b > n {
        return domain(format!(
            "exact sign test needs b <= n <= 64, got n = {n}, b = {b}"
        ));
    }
    let Some(k) = tail_start(n, b) else {
        return Ok(1.0);
    };
    let mut coeff: u128 = 1; // C(n, 0)
    let mut tail: u128 = 0;
    for x in 0..=n {
        if x >= k {
            tail += coeff;
        }
        coeff = coeff * u128::from(n - x) / u128::from(x + 1);
    }
    let p = tail as f64 / 2f64.powi(n as i32 - 1);
    Ok(p.min(1.0))
}

/// Log-space tail sum through `ln Γ`, with Neumaier-compensated summation.
pub fn sign_test_p_value_log_space(n: u64, b: u64) -> Result<f64> {
    if b > n {
        return domain(format!("count {b} exceeds n = {n}"));
    }
    let Some(k) = tail_start(n, b) else {
        return Ok(1.0);
    };
    let nf = n as f64;
    let ln_n_fact = ln_gamma_unchecked(nf + 1.0);
    let log_half_scale = (nf - 1.0) * std::f64::consts::LN_2;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in k..=n {
        let xf = x as f64;
        let term =
            (ln_n_fact - ln_gamma_unchecked(xf + 1.0) - ln_gamma_unchecked(nf - xf + 1.0) - log_half_scale)
                .exp();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok((sum + comp).min(1.0))
}

/// Exact two-sided binomial sign test on the ratios: `b` counts ratios
/// strictly greater than 1, and ties at exactly 1 count as "not above".
pub fn binomial_sign_test(ratios: &[f64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if ratios.is_empty() {
        return domain("sign test needs at least one ratio");
    }
    if let Some(bad) = ratios.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return domain(format!("ratio {bad} is outside (0, inf)"));
    }
    let n = ratios.len();
    let above = ratios.iter().filter(|&&x| x > 1.0).count();
    let ties = ratios.iter().filter(|&&x| x == 1.0).count();
    let p = sign_test_p_value(n as u64, above as u64)?;
    Ok(TestReport::new(
        above as f64,
        p,
        alpha,
        Method::BinomialSign { n, ties },
    ))
}
