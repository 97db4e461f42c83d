//! Monte Carlo power of the accuracy test against the binomial sign test.
//!
//! Forecast bias is parametrised by `β > -1` through `GM(S) = (1 + β) GM(R)`,
//! so `β = 0` is the null. Each scenario family is calibrated so that the
//! ratio `S / R` has geometric mean exactly `1 + β`.
//!
//! Every estimate is a pure function of `(scenario, seed)`: a grid point
//! owns one [`RngStream`] and replication `k` uses `stream.fork(k)`, so the
//! work can be split across threads in any way without changing a bit of
//! the output. Counts are summed, which is order-insensitive.

use serde::{Deserialize, Serialize};

use crate::distributions::{
    gm_gamma_ratio, gm_lognormal, sample_correlated_log_pair, sample_gamma, var_log_gamma_ratio, GammaParams,
    LogCorrelation, LogNormalParams,
};
use crate::error::{domain, Result};
use crate::hypothesis::{binomial_sign_test, make_ratio_sample, t_test_mu0, ShapiroWilk, DEFAULT_ALPHA};
use crate::rng::RngStream;
use crate::specfn::{digamma, inverse_digamma};

/// Replications per power point unless overridden.
pub const DEFAULT_POWER_REPS: u64 = 10_000;
/// Replications per rejection-table row unless overridden.
pub const DEFAULT_TABLE1_REPS: u64 = 100_000;
pub const DEFAULT_GRID_POINTS: usize = 21;

/// Data-generating family for the pair `(S, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `log R ~ N(0, θ)`, `log S ~ N(log(1+β), θ)`, log-correlation `rho`.
    #[serde(rename = "lognormal_ratio")]
    LogNormalRatio { theta_r: f64, rho: f64 },
    /// `S ~ Gamma(a, b_S)`, `R ~ Gamma(a, (1+β) b_S)`.
    GammaFixedShape { a: f64, b_s: f64 },
    /// `R ~ Gamma(a_R, b)`, `S ~ Gamma(a_S, b)` with `ψ(a_S) = log(1+β) + ψ(a_R)`.
    GammaFixedRate { b: f64, a_r: f64 },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::LogNormalRatio { theta_r, rho } => {
                LogNormalParams::new(0.0, theta_r)?;
                LogCorrelation::new(rho)?;
            }
            Family::GammaFixedShape { a, b_s } => {
                GammaParams::new(a, b_s)?;
            }
            Family::GammaFixedRate { b, a_r } => {
                GammaParams::new(a_r, b)?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Family::LogNormalRatio { .. } => "lognormal_ratio",
            Family::GammaFixedShape { .. } => "gamma_fixed_shape",
            Family::GammaFixedRate { .. } => "gamma_fixed_rate",
        }
    }

    /// Default β range for the family: ±0.2 for lognormal, ±0.7 for gamma.
    pub fn default_beta_range(&self) -> (f64, f64) {
        match self {
            Family::LogNormalRatio { .. } => (-0.2, 0.2),
            _ => (-0.7, 0.7),
        }
    }
}

/// How a replication whose log-ratios fail the normality gate counts
/// toward the accuracy test's rejection rate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityGate {
    /// The test is not used, so the replication counts as a non-rejection.
    #[default]
    Conservative,
    /// The t-test decision is counted whatever Shapiro-Wilk says.
    Bypass,
}

impl NormalityGate {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalityGate::Conservative => "conservative",
            NormalityGate::Bypass => "bypass",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerScenario {
    pub family: Family,
    pub beta_grid: Vec<f64>,
    pub n: usize,
    pub reps: u64,
    pub alpha: f64,
    pub seed: u64,
    pub gate: NormalityGate,
    /// Namespace for RNG streams, so several curves under one seed stay independent.
    pub curve: u32,
}

impl PowerScenario {
    /// Scenario with the family's default 21-point β grid and the default
    /// replication count, level and gate.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        let (lo, hi) = family.default_beta_range();
        Self {
            family,
            beta_grid: beta_grid(lo, hi, DEFAULT_GRID_POINTS),
            n,
            reps: DEFAULT_POWER_REPS,
            alpha: DEFAULT_ALPHA,
            seed,
            gate: NormalityGate::default(),
            curve: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.n < 3 {
            return domain(format!("sample size must be at least 3, got {}", self.n));
        }
        if self.n > 5000 {
            return domain(format!("sample size must be at most 5000, got {}", self.n));
        }
        if self.reps < 1 {
            return domain("reps must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.beta_grid.is_empty() {
            return domain("beta grid is empty");
        }
        for &beta in &self.beta_grid {
            check_beta(beta)?;
        }
        Ok(())
    }

    /// Stream id of grid point `index`.
    pub fn stream_id(&self, index: usize) -> u64 {
        (u64::from(self.curve) << 32) | index as u64
    }
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn beta_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                // round away the representation noise of lo + i*step
                let v = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                (v * 1e12).round() / 1e12
            })
            .collect(),
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > -1.0) {
        return domain(format!("beta must be finite and greater than -1, got {beta}"));
    }
    Ok(())
}

/// Concrete marginal parameters for `(S, R)` at one value of β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairModel {
    LogNormal {
        s: LogNormalParams,
        r: LogNormalParams,
        rho: LogCorrelation,
    },
    /// Independent gamma marginals.
    Gamma { s: GammaParams, r: GammaParams },
}

impl PairModel {
    /// Geometric mean of `S / R` implied by the parameters.
    pub fn gm_ratio(&self) -> f64 {
        match self {
            PairModel::LogNormal { s, r, .. } => gm_lognormal(s) / gm_lognormal(r),
            PairModel::Gamma { s, r } => gm_gamma_ratio(s, r),
        }
    }

    /// Variance of `log(S / R)`.
    pub fn var_log_ratio(&self) -> f64 {
        match self {
            PairModel::LogNormal { s, r, rho } => {
                s.theta() + r.theta() - 2.0 * rho.value() * (s.theta() * r.theta()).sqrt()
            }
            PairModel::Gamma { s, r } => {
                var_log_gamma_ratio(s, r, LogCorrelation::new(0.0).expect("0 is valid"))
            }
        }
    }

    /// One draw of `(S, R)`.
    pub fn sample_pair(&self, stream: &mut RngStream) -> (f64, f64) {
        match self {
            PairModel::LogNormal { s, r, rho } => {
                let (ls, lr) = sample_correlated_log_pair(s, r, *rho, stream);
                (ls.exp(), lr.exp())
            }
            PairModel::Gamma { s, r } => {
                let sv = sample_gamma(s, stream);
                let rv = sample_gamma(r, stream);
                (sv, rv)
            }
        }
    }
}

/// Parameters for `(S, R)` such that `GM(S / R) = 1 + β`.
pub fn calibrate_scenario(family: &Family, beta: f64) -> Result<PairModel> {
    family.validate()?;
    check_beta(beta)?;
    let log_bias = beta.ln_1p();
    Ok(match *family {
        Family::LogNormalRatio { theta_r, rho } => PairModel::LogNormal {
            s: LogNormalParams::new(log_bias, theta_r)?,
            r: LogNormalParams::new(0.0, theta_r)?,
            rho: LogCorrelation::new(rho)?,
        },
        Family::GammaFixedShape { a, b_s } => PairModel::Gamma {
            s: GammaParams::new(a, b_s)?,
            r: GammaParams::new(a, (1.0 + beta) * b_s)?,
        },
        Family::GammaFixedRate { b, a_r } => {
            let a_s = inverse_digamma(log_bias + digamma(a_r)?)?;
            PairModel::Gamma {
                s: GammaParams::new(a_s, b)?,
                r: GammaParams::new(a_r, b)?,
            }
        }
    })
}

/// Monte Carlo standard errors `√(p̂(1 - p̂)/reps)` of the three rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McStdErr {
    pub accuracy: f64,
    pub binomial: f64,
    pub normality_gate: f64,
}

/// Estimated rejection rates at one β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub beta: f64,
    pub reps: u64,
    pub reject_rate_accuracy: f64,
    pub reject_rate_binomial: f64,
    /// Fraction of replications in which Shapiro-Wilk rejected the log-ratios.
    pub normality_gate_rate: f64,
    pub mc_std_err: McStdErr,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    accuracy: u64,
    binomial: u64,
    gate: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            accuracy: self.accuracy + o.accuracy,
            binomial: self.binomial + o.binomial,
            gate: self.gate + o.gate,
        }
    }
}

fn std_err(rate: f64, reps: u64) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

fn replicate(
    model: &PairModel,
    sw: &ShapiroWilk,
    scenario: &PowerScenario,
    stream: &RngStream,
    rep: u64,
) -> Result<Counts> {
    let mut rng = stream.fork(rep);
    let n = scenario.n;
    let mut observed = Vec::with_capacity(n);
    let mut forecast = Vec::with_capacity(n);
    for _ in 0..n {
        let (s, r) = model.sample_pair(&mut rng);
        observed.push(s);
        forecast.push(r);
    }
    let sample = make_ratio_sample(&observed, &forecast)?;
    let alpha = scenario.alpha;

    // The accuracy and sign tests see the same simulated sample.
    let normality = sw.test(sample.log_ratios(), alpha)?;
    let accuracy_reject = match (scenario.gate, normality.reject) {
        (NormalityGate::Conservative, true) => false,
        _ => t_test_mu0(sample.log_ratios(), alpha)?.reject,
    };
    let binomial = binomial_sign_test(sample.ratios(), alpha)?;
    Ok(Counts {
        accuracy: u64::from(accuracy_reject),
        binomial: u64::from(binomial.reject),
        gate: u64::from(normality.reject),
    })
}

fn sum_replications<F>(reps: u64, f: F) -> Result<Counts>
where
    F: Fn(u64) -> Result<Counts> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..reps)
            .into_par_iter()
            .map(f)
            .try_reduce(Counts::default, |a, b| Ok(a + b))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).try_fold(Counts::default(), |acc, r| Ok(acc + f(r)?))
    }
}

/// Rejection rates at one β, drawing from stream `stream_id` under the
/// scenario's seed.
pub fn run_power_point(scenario: &PowerScenario, beta: f64, stream_id: u64) -> Result<PowerPoint> {
    let model = calibrate_scenario(&scenario.family, beta)?;
    let sw = ShapiroWilk::new(scenario.n)?;
    let stream = RngStream::new(scenario.seed, stream_id);
    let counts = sum_replications(scenario.reps, |rep| {
        replicate(&model, &sw, scenario, &stream, rep)
    })?;
    let reps = scenario.reps;
    let rate = |c: u64| c as f64 / reps as f64;
    let (acc, bin, gate) = (rate(counts.accuracy), rate(counts.binomial), rate(counts.gate));
    Ok(PowerPoint {
        beta,
        reps,
        reject_rate_accuracy: acc,
        reject_rate_binomial: bin,
        normality_gate_rate: gate,
        mc_std_err: McStdErr {
            accuracy: std_err(acc, reps),
            binomial: std_err(bin, reps),
            normality_gate: std_err(gate, reps),
        },
    })
}

/// One [`PowerPoint`] per grid value, in grid order.
pub fn run_power_curve(scenario: &PowerScenario) -> Result<Vec<PowerPoint>> {
    scenario.validate()?;
    let point = |(i, &beta): (usize, &f64)| run_power_point(scenario, beta, scenario.stream_id(i));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        scenario.beta_grid.par_iter().enumerate().map(point).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        scenario.beta_grid.iter().enumerate().map(point).collect()
    }
}

/// `(a, b, n)` for the twelve Shapiro-Wilk rejection-rate cases, in table order.
pub const TABLE1_CASES: [(f64, f64, usize); 12] = [
    (3.0, 1.0, 20),
    (3.0, 5.0, 20),
    (3.0, 10.0, 20),
    (3.0, 1.0, 100),
    (3.0, 5.0, 100),
    (3.0, 10.0, 100),
    (1.0, 3.0, 20),
    (5.0, 3.0, 20),
    (10.0, 3.0, 20),
    (1.0, 3.0, 100),
    (5.0, 3.0, 100),
    (10.0, 3.0, 100),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub case: usize,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub reps: u64,
    /// Percentage of replications with Shapiro-Wilk `p <= 0.05`.
    pub reject_pct: f64,
    pub std_err_pct: f64,
}

/// Shapiro-Wilk rejection rate at level 0.05 for `n` log-ratios of two
/// independent `Gamma(a, b)` variables, for each of [`TABLE1_CASES`].
/// Row `i` draws from stream `i` of `seed`.
pub fn run_table1(reps: u64, seed: u64) -> Result<Vec<Table1Row>> {
    if reps < 1 {
        return domain("reps must be at least 1");
    }
    let row = |(i, &(a, b, n)): (usize, &(f64, f64, usize))| -> Result<Table1Row> {
        let params = GammaParams::new(a, b)?;
        let sw = ShapiroWilk::new(n)?;
        let stream = RngStream::new(seed, i as u64);
        let counts = sum_replications(reps, |rep| {
            let mut rng = stream.fork(rep);
            let y: Vec<f64> = (0..n)
                .map(|_| {
                    let s = sample_gamma(&params, &mut rng);
                    let r = sample_gamma(&params, &mut rng);
                    (s / r).ln()
                })
                .collect();
            let reject = sw.test(&y, DEFAULT_ALPHA)?.reject;
            Ok(Counts {
                gate: u64::from(reject),
                ..Counts::default()
            })
        })?;
        let rate = counts.gate as f64 / reps as f64;
        Ok(Table1Row {
            case: i + 1,
            a,
            b,
            n,
            reps,
            reject_pct: 100.0 * rate,
            std_err_pct: 100.0 * std_err(rate, reps),
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        TABLE1_CASES.par_iter().enumerate().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        TABLE1_CASES.iter().enumerate().map(row).collect()
    }
}
