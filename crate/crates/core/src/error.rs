use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension {requested} exceeds the configured maximum {max_dim}")]
    Sizing { requested: usize, max_dim: usize },

    #[error("{message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("operator is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("alphabet mismatch: {0}")]
    Mismatch(String),

    #[error("enumeration of {required} deterministic strategy pairs exceeds the budget of {budget}; use smaller alphabets")]
    EnumerationBudget { required: u128, budget: u128 },

    #[error("game does not have complete support: q({a},{b}) = {value}")]
    IncompleteSupport { a: usize, b: usize, value: f64 },

    #[error("Alice's measurements must be projective; run projectivize first")]
    NotProjective,

    #[error("degenerate discrimination instance: {0}")]
    DegenerateInstance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
