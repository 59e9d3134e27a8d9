use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A mathematical precondition was violated (non-positive argument,
    /// parameter outside the supported range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    /// Matrix / vector shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A run configuration failed validation. The message names the key.
    #[error("config error: {0}")]
    Config(String),

    /// Not enough data for an estimator (too few trials, too few points).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::NonConvergence(_) => 3,
            _ => 1,
        }
    }
}
