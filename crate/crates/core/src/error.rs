use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grids are incompatible: (n={0}, M={1}) vs (n={2}, M={3})")]
    IncompatibleGrids(usize, f64, usize, f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("luck function is not supported by this engine: {0}")]
    UnsupportedLuck(&'static str),

    #[error("kernel is not supported by this engine: {0}")]
    UnsupportedKernel(&'static str),

    #[error("match score {0} is not supported by this engine")]
    UnsupportedScore(f64),

    #[error("observed outcome has zero probability under the model")]
    ImpossibleOutcome,

    #[error("player {0:?} cannot play against themselves")]
    SelfMatch(String),

    #[error("unknown player {0:?}")]
    UnknownPlayer(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("integrity error at line {line}: {message}")]
    IntegrityAt { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
