use thiserror::Error;

use crate::sim::SimTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing parameter `{0}` for this control scheme")]
    MissingParameter(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("unsupported transfer-function structure: {0}")]
    UnsupportedStructure(String),

    #[error("series did not converge after {terms} terms (last correction {delta:e})")]
    NonConvergence { terms: usize, delta: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("periodic orbit search did not converge: {0}")]
    NoConvergence(String),

    #[error("degenerate orbit: duty cycle {duty} is saturated")]
    DegenerateOrbit { duty: f64 },

    #[error("state diverged at cycle {cycle}")]
    Divergence { cycle: usize, partial: Box<SimTrace> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
