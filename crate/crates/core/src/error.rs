use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected S^{expected}, found S^{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation not supported on S^{0} (only S^1 and S^2 are evaluated)")]
    UnsupportedDimension(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("point set does not span the polynomial space (rank {rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("singular node set: interpolation is not unique")]
    Singular,
    #[error("missing degree(s) {0:?} in triangular array")]
    MissingDegree(Vec<usize>),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("quadrature exactness {have} is below the required {need}")]
    InsufficientExactness { have: usize, need: usize },
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
