use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Paired observations `s_i` and forecasts `r_i` with their ratios
/// `x_i = s_i / r_i` and log-ratios `y_i = log x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    observed: Vec<f64>,
    forecast: Vec<f64>,
    ratios: Vec<f64>,
    log_ratios: Vec<f64>,
    has_duplicates: bool,
}

impl RatioSample {
    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn forecast(&self) -> &[f64] {
        &self.forecast
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratios
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// Set when two ratios are exactly equal. The tests assume a continuous
    /// model, so ties are worth a warning but do not invalidate the sample.
    pub fn has_duplicates(&self) -> bool {
        self.has_duplicates
    }
}

pub fn make_ratio_sample(observed: &[f64], forecast: &[f64]) -> Result<RatioSample> {
    if observed.len() != forecast.len() {
        return domain(format!(
            "observed has {} values but forecast has {}",
            observed.len(),
            forecast.len()
        ));
    }
    if observed.len() < 3 {
        return domain(format!("need at least 3 pairs, got {}", observed.len()));
    }
    for (i, (&s, &r)) in observed.iter().zip(forecast).enumerate() {
        if !(s.is_finite() && s > 0.0) {
            return domain(format!(
                "observed value {} at index {i} is not strictly positive",
                s
            ));
        }
        if !(r.is_finite() && r > 0.0) {
            return domain(format!(
                "forecast value {} at index {i} is not strictly positive",
                r
            ));
        }
    }
    let ratios: Vec<f64> = observed.iter().zip(forecast).map(|(s, r)| s / r).collect();
    if let Some(bad) = ratios.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return domain(format!("ratio {bad} is outside (0, inf)"));
    }
    let log_ratios = ratios.iter().map(|x| x.ln()).collect();

    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let has_duplicates = sorted.windows(2).any(|w| w[0] == w[1]);

    Ok(RatioSample {
        observed: observed.to_vec(),
        forecast: forecast.to_vec(),
        ratios,
        log_ratios,
        has_duplicates,
    })
}

/// Sample geometric mean of the ratios, computed as `exp(mean log x_i)`.
pub fn geometric_mean(sample: &RatioSample) -> f64 {
    let y = sample.log_ratios();
    (y.iter().sum::<f64>() / y.len() as f64).exp()
}

/// Box-Cox transform `(x^λ - 1) / λ`, with the `λ → 0` limit `log x`.
pub fn box_cox(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !lambda.is_finite() {
        return domain(format!("Box-Cox lambda must be finite, got {lambda}"));
    }
    x.iter()
        .map(|&v| {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("Box-Cox needs positive values, got {v}"));
            }
            let t = lambda * v.ln();
            Ok(if lambda == 0.0 {
                v.ln()
            } else if t.abs() < 0.5 {
                t.exp_m1() / lambda
            } else {
                (v.powf(lambda) - 1.0) / lambda
            })
        })
        .collect()
}
