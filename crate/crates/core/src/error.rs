use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    #[error("kernel not invertible: J_k = {value} at k = {k}")]
    Stability { k: f64, value: f64 },

    #[error("coupling sum diverges for 2*alpha = {two_alpha} <= 1")]
    Divergent { two_alpha: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("wrong phase: {0}")]
    Phase(String),

    #[error("norm drift {0:e} exceeds tolerance")]
    NormDrift(f64),

    #[error("insufficient trajectories: stderr {stderr:e} above tolerance {tolerance:e}")]
    InsufficientTrajectories { stderr: f64, tolerance: f64 },

    #[error("resource bound exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
