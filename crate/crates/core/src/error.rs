//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("basis mismatch between operands")]
    BasisMismatch,

    #[error("sector {needed} not available (kmax = {kmax})")]
    SectorUnavailable { needed: usize, kmax: usize },

    #[error("system too large: {0}")]
    TooLarge(String),

    #[error("linear system is singular (condition estimate {cond:.3e})")]
    SingularSystem { cond: f64 },

    #[error("root bracketing failed: {0}")]
    BracketMiss(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
