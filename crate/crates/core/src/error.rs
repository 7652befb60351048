use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// J_n vanishes (to within the degeneracy tolerance) where a ratio needs it.
    #[error("pole: {0}")]
    Pole(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("zero cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("cannot parse coefficient list: {0}")]
    Parse(String),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    /// Two distinct disk modes within 1e-9 of each other.
    #[error("near tie in disk spectrum: {0}")]
    Tie(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("classification: {0}")]
    Classification(String),

    #[error("serialization: {0}")]
    Serialize(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
