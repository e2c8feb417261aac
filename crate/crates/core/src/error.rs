use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("odd pfaffian arity {0}")]
    OddPfaffian(usize),
    #[error("index sets do not partition the parent set")]
    NotAPartition,
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("negative regular depth {0}")]
    NegativeDepth(i64),
    #[error("field is not homogeneous in conformal weight")]
    NotHomogeneous,
    #[error("truncation {given} too small, need at least {needed}")]
    TruncationTooSmall { given: usize, needed: usize },
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("coincident points z{0} = z{1}")]
    CoincidentPoints(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
