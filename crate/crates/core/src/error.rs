use thiserror::Error;

/// Errors raised by the geometry kernel and everything built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: expected 1 <= n <= 4")]
    InvalidDimension(usize),

    #[error("need at least {needed} points in dimension {dim}, got {got}")]
    TooFewPoints { dim: usize, needed: usize, got: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate transform: scale must be nonzero")]
    DegenerateTransform,

    #[error("point set is not full-dimensional in R^{0}")]
    NotFullDimensional(usize),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    #[error("numerical convergence failure: {0}")]
    Convergence(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
