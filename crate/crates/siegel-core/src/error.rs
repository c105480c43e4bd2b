//! Error type shared by every module.

use thiserror::Error;

use crate::reduction::ReductionResult;

pub type Result<T> = std::result::Result<T, SiegelError>;

#[derive(Debug, Error)]
pub enum SiegelError {
    /// Malformed input: wrong shape, asymmetric matrix, non-symplectic element, bad parameter.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested degree or size is not supported by the algorithm.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A linear system was too ill-conditioned to trust.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// A finite-difference stencil left the positive cone.
    #[error("step-size error: {0}")]
    StepSize(String),

    /// Result failed an internal accuracy or consistency check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An integral or series does not converge for these parameters.
    #[error("divergence: {0}")]
    Divergent(String),

    /// Iteration limit reached; the partial result is attached.
    #[error("no convergence after {iterations} iterations")]
    Convergence {
        iterations: usize,
        partial: Box<ReductionResult>,
    },
}

impl SiegelError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SiegelError::Validation(_)
            | SiegelError::Domain(_)
            | SiegelError::Unsupported(_)
            | SiegelError::Divergent(_) => 2,
            SiegelError::Conditioning(_)
            | SiegelError::StepSize(_)
            | SiegelError::Numerical(_)
            | SiegelError::Convergence { .. } => 3,
        }
    }
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(SiegelError::Validation(msg.into()))
}
