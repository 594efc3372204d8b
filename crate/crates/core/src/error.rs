use thiserror::Error;

use crate::linalg::LinalgError;
use crate::zx::ZxError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Zx(#[from] ZxError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("transfer matrix has imaginary residue {0:e}; input is not a CP map in this basis")]
    ImaginaryResidue(f64),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("dataset error: {0}")]
    Data(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
