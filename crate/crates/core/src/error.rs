use thiserror::Error;

/// Errors raised by field arithmetic, set construction, state handling and the bounds machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} exceeds the supported range (q < 2^31)")]
    Overflow(u64),

    #[error("division by zero: 0 has no multiplicative inverse")]
    DivisionByZero,

    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u64, right: u64 },

    #[error("value {value} is not a residue modulo {q}")]
    NotAResidue { value: u64, q: u64 },

    #[error("search needs {required} bias evaluations but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("modulus {q} exceeds the exhaustive scan cap of {cap}")]
    ScanTooLarge { q: u64, cap: u64 },

    #[error("domain of size {size} exceeds the exhaustive limit {limit}")]
    DomainTooLarge { size: u128, limit: u128 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("index {index} out of range for family of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{0}")]
    Range(String),

    #[error("invalid bias set: {0}")]
    InvalidSet(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
