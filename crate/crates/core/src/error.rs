use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite potential entry at (n={n}, m={m})")]
    NonFinite { n: usize, m: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian at ({row}, {col}): deviation {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("eigenvalue iteration did not converge for eigenvalue {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenvalue residual bound {bound:e} exceeds tolerance {tolerance:e}")]
    Inaccurate { bound: f64, tolerance: f64 },

    #[error("eigensolve failed at phase (theta={theta}, phi={phi}): {source}")]
    AtPhase {
        theta: f64,
        phi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("periods are not nested: {0}")]
    NotNested(String),

    #[error("resolution {resolution} too coarse to resolve the gap; need at least {required}")]
    ResolutionTooCoarse { resolution: usize, required: usize },

    #[error("check failed: {0}")]
    CheckFailed(String),
}
