use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point set spans an affine subspace of dimension {affine_dim} in R^{ambient}")]
    DimensionDeficient { ambient: usize, affine_dim: usize },

    #[error("symplectic operations need even dimension, got {0}")]
    OddDimension(usize),

    #[error("the origin is not an interior point")]
    OriginNotInterior,

    #[error("polytope is not centrally symmetric")]
    NotSymmetric,

    #[error("polytope is not symplectically self-polar; use suspend_halfspaces for general symmetric bodies")]
    NotSelfPolar,

    #[error("matrix is singular")]
    Singular,

    #[error("empty input")]
    Empty,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("search budget exceeded: {needed} evaluations needed, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
