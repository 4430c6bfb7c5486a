use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degree {degree} exceeds ambient dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("index {index} outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("multi-index {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),

    #[error("index {0} repeated within a term")]
    RepeatedIndex(usize),

    #[error("coordinate map is not injective (target index {0} hit twice)")]
    NonInjective(usize),

    #[error("frame is not orthonormal (max Gram deviation {0:e})")]
    NonOrthonormal(f64),

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("oracle guard violated: N = {dim}, m = {degree} (requires N <= 8, m <= 4)")]
    GuardViolation { dim: usize, degree: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("form is not simple: {0}")]
    NonSimple(String),

    #[error("coordinate blocks overlap at index {0}")]
    OverlappingBlocks(usize),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid link: {0}")]
    InvalidLink(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
