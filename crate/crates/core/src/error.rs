use thiserror::Error;

/// Errors raised across the crate.
///
/// Each variant has a stable machine-readable [`Error::kind`] that the CLI
/// prints alongside the message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {n} is not a prime greater than 2")]
    NotPrime { n: u64 },
    #[error("progression length {k} invalid for modulus {n} (need 3 <= k < n)")]
    InvalidProgression { n: u64, k: usize },
    #[error("colorings have different lengths ({left} vs {right})")]
    InvalidPair { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible overlap triple (alpha={alpha}, beta={beta}, gamma={gamma})")]
    InvalidOverlap { alpha: f64, beta: f64, gamma: f64 },
    #[error("closed-form second moment only exists for k = 3 (got k = {0})")]
    UnsupportedK(usize),
    #[error("n = {n} exceeds the exhaustive enumeration bound {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("every trial hit the node budget; raise --budget")]
    BudgetTooSmall,
    #[error("scan rows do not bracket p_hat = 1/2")]
    InsufficientRange,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime { .. } => "invalid-modulus",
            Error::InvalidProgression { .. } => "invalid-progression",
            Error::InvalidPair { .. } => "invalid-pair",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidOverlap { .. } => "invalid-overlap",
            Error::UnsupportedK(_) => "unsupported-k",
            Error::TooLarge { .. } => "too-large",
            Error::BudgetTooSmall => "budget-too-small",
            Error::InsufficientRange => "insufficient-range",
            Error::Parse { .. } => "parse-error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
