//! Hypothesis tests on observed/forecast ratios: the log-ratio accuracy
//! test (Shapiro-Wilk gate followed by a one-sample t-test) and the exact
//! two-sided binomial sign test.

mod accuracy;
mod sample;
mod shapiro;
mod sign;
mod student;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use accuracy::{accuracy_test, AccuracyVerdict, Outcome};
pub use sample::{box_cox, geometric_mean, make_ratio_sample, RatioSample};
pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use sign::{binomial_sign_test, sign_test_p_value, sign_test_p_value_exact, sign_test_p_value_log_space};
pub use student::t_test_mu0;

/// Test level used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Which test produced a [`TestReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Method {
    ShapiroWilk {
        n: usize,
    },
    StudentT {
        df: usize,
    },
    /// `ties` counts ratios exactly equal to 1; they are counted as "not above 1".
    BinomialSign {
        n: usize,
        ties: usize,
    },
}

/// Outcome of a single test at level `alpha`. `reject` holds exactly when
/// `p_value <= alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub method: Method,
}

impl TestReport {
    pub(crate) fn new(statistic: f64, p_value: f64, alpha: f64, method: Method) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            statistic,
            p_value,
            alpha,
            reject: p_value <= alpha,
            method,
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("test level must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}
