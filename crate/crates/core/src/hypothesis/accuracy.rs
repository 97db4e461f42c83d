use serde::{Deserialize, Serialize};

use super::{check_alpha, t_test_mu0, RatioSample, ShapiroWilk, TestReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The t-test rejected `GM(X) = 1`.
    Inaccurate,
    /// Normality held and the t-test did not reject.
    NotRejected,
    /// Shapiro-Wilk rejected normality of the log-ratios; the t-test was not run.
    NormalityRejected,
}

/// Result of the accuracy procedure. `location` is absent exactly when the
/// normality gate rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyVerdict {
    pub normality: TestReport,
    pub location: Option<TestReport>,
    pub outcome: Outcome,
}

/// Log-ratio accuracy test: Shapiro-Wilk on `log x_i`, then, if normality
/// is not rejected, a t-test of zero mean log-ratio. Rejection at either
/// stage means `p <= alpha`.
pub fn accuracy_test(sample: &RatioSample, alpha: f64) -> Result<AccuracyVerdict> {
    let sw = ShapiroWilk::new(sample.len())?;
    accuracy_test_prepared(&sw, sample.log_ratios(), alpha)
}

pub(crate) fn accuracy_test_prepared(
    sw: &ShapiroWilk,
    log_ratios: &[f64],
    alpha: f64,
) -> Result<AccuracyVerdict> {
    check_alpha(alpha)?;
    let normality = match sw.test(log_ratios, alpha) {
        Err(Error::Degenerate(_)) => {
            return Err(Error::Degenerate(
                "log-ratios have zero variance (every forecast is off by the same factor)".into(),
            ))
        }
        other => other?,
    };
    if normality.reject {
        return Ok(AccuracyVerdict {
            normality,
            location: None,
            outcome: Outcome::NormalityRejected,
        });
    }
    let location = t_test_mu0(log_ratios, alpha)?;
    let outcome = if location.reject {
        Outcome::Inaccurate
    } else {
        Outcome::NotRejected
    };
    Ok(AccuracyVerdict {
        normality,
        location: Some(location),
        outcome,
    })
}
