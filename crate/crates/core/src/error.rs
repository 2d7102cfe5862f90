use thiserror::Error;

/// Errors raised across the simulation and verification pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("kernel with alpha = {alpha} is not twice differentiable at the origin")]
    NotC2 { alpha: f64 },
    #[error("kernel with alpha = {alpha} has no regularly varying spectral tail")]
    NotHeavyTail { alpha: f64 },
    #[error("synthesis failed: {0}")]
    Synthesis(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("empty or undersized sample (need at least {needed}, got {got})")]
    EmptySample { needed: usize, got: usize },
    #[error("censor budget exceeded: {censored} of {total} replicates censored")]
    CensorBudgetExceeded { censored: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
