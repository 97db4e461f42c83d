//! Forecast accuracy backtesting on observed/forecast ratios.
//!
//! The accuracy test asks whether the geometric mean of `x_i = s_i / r_i`
//! equals 1: the log-ratios are checked for normality with Shapiro-Wilk and
//! then tested for zero mean with a one-sample t-test. The exact binomial
//! sign test on the count of ratios above 1 is provided as the baseline, and
//! [`power`] estimates the power of both by seeded Monte Carlo.

pub mod distributions;
pub mod error;
pub mod hypothesis;
pub mod power;
pub mod report;
pub mod rng;
pub mod specfn;

pub use error::{Error, Result};
pub use rng::RngStream;
