use thiserror::Error;

/// Errors raised by the numeric kernel, the hypothesis tests and the power engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (includes NaN inputs).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method did not reach its tolerance.
    #[error("{method} did not converge after {iterations} iterations")]
    Convergence { method: &'static str, iterations: usize },

    /// The sample carries no variability, so the statistic is undefined.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// A malformed input record; `line` is 1-based and counts the header.
    #[error("line {line}: {message}")]
    Input { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
