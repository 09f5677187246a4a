use thiserror::Error;

/// Errors produced by the selection pipeline and its stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// The input data violates a precondition (bad field, missing labels, ...).
    #[error("invalid data: {0}")]
    Data(String),

    /// A parameter or option is out of its documented range.
    #[error("invalid config: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance is singular after regularization: {0}")]
    SingularCovariance(String),

    #[error("kernel is not positive semi-definite: {0}")]
    KernelNotPsd(String),

    #[error(
        "solver did not converge after {passes} passes \
         (KKT violation {violation:.3e}, tolerance {tol:.3e})"
    )]
    Convergence {
        passes: usize,
        violation: f64,
        tol: f64,
    },

    /// No point scored above the threshold, so there is nothing to train on.
    /// Carries the score distribution to help pick a workable threshold.
    #[error(
        "consistent pool is empty at threshold {theta}; \
         scores range [{min:.4}, {max:.4}] with median {median:.4}"
    )]
    EmptyConsistentPool {
        theta: f64,
        min: f64,
        max: f64,
        median: f64,
    },

    #[error("model serialization: {0}")]
    ModelFormat(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
