use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("spectrum violates Hermitian symmetry (relative asymmetry {asymmetry:e} at index {index})")]
    HermitianViolation { index: usize, asymmetry: f64 },

    #[error("radicand 1 - 2(kappa+eps)(p+delta) = {value:e} at q = {q} is not above the margin floor {floor:e}")]
    RadicandNonPositive { q: f64, value: f64, floor: f64 },

    #[error("inadmissible configuration:\n{0}")]
    Inadmissible(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("malformed input in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 1 for I/O failures, 2 for every domain error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            _ => 2,
        }
    }
}
