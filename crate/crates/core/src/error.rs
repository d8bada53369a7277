use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("dimension {dim} exceeds vertex-enumeration cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("boundary must contain at least one functional")]
    EmptyBoundary,

    #[error("boundary has rank {rank} but dimension is {dim}; max over it is not a norm")]
    RankDeficient { rank: usize, dim: usize },

    #[error("boundary element {index} never attains the norm (best value {best})")]
    Dominated { index: usize, best: f64 },

    #[error("boundary elements {first} and {second} coincide up to sign")]
    DuplicateBoundary { first: usize, second: usize },

    #[error("zero functional has no leveling")]
    ZeroFunctional,

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gradient undefined at the origin")]
    ZeroVector,

    #[error("no admissible level found: {0}")]
    NoAdmissibleLevel(String),

    #[error("linear program failed: {0}")]
    Solver(String),
}
