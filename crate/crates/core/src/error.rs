use thiserror::Error;

use crate::markov::StabilityReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Stencil weights that should form a probability distribution do not sum to one.
    #[error("stencil weights sum to {sum}, expected 1")]
    Inconsistent { sum: f64 },

    #[error("scheme is not probabilistic (violated entries: {:?})", .0.violated_entries)]
    Stability(Box<StabilityReport>),

    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
