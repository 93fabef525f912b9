use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a chain complex: {0}")]
    NotComplex(String),
    #[error("grading mismatch: {0}")]
    Grading(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("wrong modulus: expected {expected}, got {got}")]
    WrongModulus { expected: u32, got: u32 },
    #[error("group is not finite")]
    NotFinite,
    #[error("order {order} exceeds bound {bound}")]
    BoundExceeded { order: String, bound: u64 },
    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),
    #[error("map degree {0} not allowed here")]
    Degree(i64),
    #[error("invalid filtration: {0}")]
    Filtration(String),
    #[error("hypotheses not verified: {0}")]
    Unverified(String),
    #[error("spectral sequence did not collapse: {0}")]
    NonCollapse(String),
    #[error("retry budget of {0} exhausted")]
    RetryExhausted(usize),
    #[error("puzzle: {0}")]
    Puzzle(String),
    #[error("inconsistent constraints, first violated rule {rule}: {detail}")]
    Inconsistent { rule: String, detail: String },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("relation {name} fails: {detail}")]
    RelationFailed { name: String, detail: String },
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Malformed input is a caller error; everything else is a domain error.
    pub fn is_malformed(&self) -> bool {
        matches!(self, Error::Malformed(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
