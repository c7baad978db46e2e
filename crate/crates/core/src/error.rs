use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("censored fraction {fraction} exceeds threshold {threshold}; estimate would be biased")]
    Censored { fraction: f64, threshold: f64 },
    #[error("fit rejected: {0}")]
    FitRejected(String),
    #[error("unstable estimate: {0}")]
    Unstable(String),
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("convention mismatch: {0}")]
    Convention(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
