use thiserror::Error;

use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("cone is not pointed: it contains a line")]
    NotPointed,

    #[error("invalid Carnot algebra: {0}")]
    InvalidAlgebra(String),

    #[error("BCH product is only implemented through step 4, algebra has step {0}")]
    UnsupportedStep(usize),

    #[error("time form is not exact: {0}")]
    NotExact(String),

    #[error("unit-time section is unbounded: time form is non-positive on cone direction {direction:?}")]
    Unbounded { direction: Vector },

    #[error("time parameter stalls on segment {segment} (tau = {value:e})")]
    StalledParameter { segment: usize, value: f64 },

    #[error("operation not available for this model: {0}")]
    WrongModel(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
