//! Random variates for the lognormal and gamma scenario families, and the
//! closed-form geometric means that calibrate them.
//!
//! Gamma distributions use the rate parametrization throughout: density
//! `b^a / Γ(a) z^{a-1} e^{-bz}`, mean `a/b`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng::RngStream;
use crate::specfn::{digamma_unchecked, ln_gamma_unchecked, trigamma_unchecked};

/// Parameters of `log X ~ Normal(mu, theta)`; `theta` is the variance of the log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    mu: f64,
    theta: f64,
}

impl LogNormalParams {
    pub fn new(mu: f64, theta: f64) -> Result<Self> {
        if !mu.is_finite() {
            return domain(format!("lognormal mu must be finite, got {mu}"));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return domain(format!("lognormal theta must be positive, got {theta}"));
        }
        Ok(Self { mu, theta })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Gamma distribution with shape `a` and rate `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    a: f64,
    b: f64,
}

impl GammaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return domain(format!("gamma shape must be positive, got {a}"));
        }
        if !(b.is_finite() && b > 0.0) {
            return domain(format!("gamma rate must be positive, got {b}"));
        }
        Ok(Self { a, b })
    }

    pub fn shape(&self) -> f64 {
        self.a
    }

    pub fn rate(&self) -> f64 {
        self.b
    }
}

/// Linear correlation between `log S` and `log R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogCorrelation(f64);

impl LogCorrelation {
    pub fn new(rho: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return domain(format!("log-correlation must lie in [-1, 1], got {rho}"));
        }
        Ok(Self(rho))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

pub fn sample_std_normal(stream: &mut RngStream) -> f64 {
    stream.std_normal()
}

/// Draws `(S, R)` with `log S ~ N(mu_S, theta_S)`, `log R ~ N(mu_R, theta_R)`
/// and correlation `rho` between the logs.
pub fn sample_correlated_lognormal_pair(
    s: &LogNormalParams,
    r: &LogNormalParams,
    rho: LogCorrelation,
    stream: &mut RngStream,
) -> (f64, f64) {
    let (log_s, log_r) = sample_correlated_log_pair(s, r, rho, stream);
    (log_s.exp(), log_r.exp())
}

pub(crate) fn sample_correlated_log_pair(
    s: &LogNormalParams,
    r: &LogNormalParams,
    rho: LogCorrelation,
    stream: &mut RngStream,
) -> (f64, f64) {
    let z1 = stream.std_normal();
    let z2 = stream.std_normal();
    let rho = rho.value();
    let log_s = s.mu + s.theta.sqrt() * z1;
    let log_r = r.mu + r.theta.sqrt() * (rho * z1 + (1.0 - rho * rho).sqrt() * z2);
    (log_s, log_r)
}

/// One `Gamma(a, b)` variate: Marsaglia–Tsang squeeze for `a >= 1`, and
/// `Gamma(a + 1) · U^{1/a}` below that.
pub fn sample_gamma(params: &GammaParams, stream: &mut RngStream) -> f64 {
    let GammaParams { a, b } = *params;
    if a < 1.0 {
        let g = marsaglia_tsang(a + 1.0, stream);
        let u = stream.uniform_open();
        return g * u.powf(1.0 / a) / b;
    }
    marsaglia_tsang(a, stream) / b
}

fn marsaglia_tsang(a: f64, stream: &mut RngStream) -> f64 {
    let d = a - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = stream.std_normal();
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = stream.uniform_open();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Geometric mean `e^mu` of a lognormal variable.
pub fn gm_lognormal(params: &LogNormalParams) -> f64 {
    params.mu.exp()
}

/// Geometric mean `e^{ψ(a)} / b` of a gamma variable.
pub fn gm_gamma(params: &GammaParams) -> f64 {
    digamma_unchecked(params.a).exp() / params.b
}

/// Geometric mean of `S / R` for gamma `S` and `R`: `(b_R / b_S) e^{ψ(a_S) - ψ(a_R)}`.
pub fn gm_gamma_ratio(s: &GammaParams, r: &GammaParams) -> f64 {
    (r.b / s.b) * (digamma_unchecked(s.a) - digamma_unchecked(r.a)).exp()
}

/// Variance of `log(S / R)` for gamma marginals with log-correlation `rho`:
/// `ψ₁(a_S) + ψ₁(a_R) - 2ρ √(ψ₁(a_S) ψ₁(a_R))`. The rates do not enter.
pub fn var_log_gamma_ratio(s: &GammaParams, r: &GammaParams, rho: LogCorrelation) -> f64 {
    let vs = trigamma_unchecked(s.a);
    let vr = trigamma_unchecked(r.a);
    let v = vs + vr - 2.0 * rho.value() * (vs * vr).sqrt();
    v.max(0.0)
}

/// Density of `log Z` for `Z ~ Gamma(a, b)`: `b^a / Γ(a) · e^{a y - b e^y}`.
pub fn loggamma_pdf(y: f64, params: &GammaParams) -> f64 {
    let GammaParams { a, b } = *params;
    let log_density = a * b.ln() - ln_gamma_unchecked(a) + a * y - b * y.exp();
    if log_density.is_nan() {
        return 0.0;
    }
    log_density.exp()
}
