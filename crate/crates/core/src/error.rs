use thiserror::Error;

use crate::engine::Trace;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("intersection is empty")]
    Infeasible,

    #[error("degenerate subgradient: g(x) = 0 while f(x) = {value} > 0")]
    DegenerateSubgradient { value: f64 },

    /// A non-finite iterate appeared; the trace holds everything up to the
    /// last finite iterate.
    #[error("iteration diverged at step {iteration}")]
    Diverged { iteration: usize, trace: Box<Trace> },

    #[error("estimation failed: {0}")]
    Estimation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
