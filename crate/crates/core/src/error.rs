use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not squarefree (divisible by {1}^2)")]
    NotSquarefree(u64, u64),
    #[error("{what} = {value} is outside the supported range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("character index {index} out of range for modulus {modulus}")]
    IndexOutOfRange { index: u64, modulus: u64 },
    #[error("{0} exceeds the table bound")]
    TooLarge(String),
    #[error("division by zero in a finite field")]
    DivisionByZero,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("box side {h} must be smaller than the characteristic {q}")]
    BoxTooLarge { h: u64, q: u64 },
    #[error("phase term magnitude {0:e} exceeds 2^52")]
    PrecisionOverflow(f64),
    #[error("linear system is singular modulo {0}")]
    SingularSystem(u64),
    #[error("enumeration needs {needed} operations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("V = {v} exceeds modulus {q}")]
    RangeViolation { v: u64, q: u64 },
    #[error("degree {0} is not supported (quadrature only handles d = 1)")]
    UnsupportedDegree(u32),
    #[error("missing mean value count {0}")]
    MissingCount(&'static str),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("degenerate denominator: r = {r} must exceed D = {big_d}")]
    DegenerateDenominator { r: u32, big_d: u32 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cache version mismatch: {0}")]
    CacheVersionMismatch(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
