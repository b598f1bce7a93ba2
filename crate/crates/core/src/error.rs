use thiserror::Error;

use crate::solver::SolverTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// Non-finite values appeared mid-run; carries the trace recorded so far.
    #[error("numerical failure at iteration {iteration}: {message}")]
    NumericalFailure {
        iteration: usize,
        message: String,
        trace: Box<SolverTrace>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
