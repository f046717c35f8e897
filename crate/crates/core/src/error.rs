use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field of size {size} exceeds the cap of {cap}")]
    FieldTooLarge { size: u128, cap: u128 },
    #[error("no irreducible polynomial of degree {0} found")]
    NoIrreducible(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element does not belong to this field")]
    ForeignElement,
    #[error("tower level {level} out of range (top level is {top})")]
    LevelOutOfRange { level: usize, top: usize },
    #[error("requested {requested} elements from a field of size {size}")]
    NotEnoughElements { requested: u64, size: u64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("matrices are defined over different fields")]
    TowerMismatch,
    #[error("singular matrix (rank {rank} of {size})")]
    Singular { rank: usize, size: usize },
    #[error("duplicate or colliding evaluation points")]
    DuplicatePoints,
    #[error("linear system has no solution")]
    Inconsistent,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("storage code failed structural verification: {0}")]
    Structure(String),
    #[error("instance needs {needed} enumerations, above the cap of {cap}")]
    OverCap { needed: u128, cap: u128 },
    #[error("sampling population of {0} pairs is too large")]
    PopulationTooLarge(u128),
    #[error("observed distribution is not uniform over a subspace")]
    NonLattice,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
