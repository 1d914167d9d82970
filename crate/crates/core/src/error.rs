use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity {arity} outside supported range {min}..={max}")]
    Arity { arity: usize, min: usize, max: usize },

    #[error("input index {index} out of range for {bits}-bit input")]
    IndexOutOfRange { index: u64, bits: u32 },

    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inner function {index} is not balanced: {weight} of {size} entries are +1")]
    Unbalanced { index: usize, weight: u64, size: u64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("predicate `{predicate}` accepts with probability {acceptance:.3e}, below the budget {minimum:.0e}")]
    DegeneratePredicate {
        predicate: String,
        acceptance: f64,
        minimum: f64,
    },

    #[error("rejection budget exhausted for predicate `{predicate}` after {attempts} attempts")]
    RejectionBudget { predicate: String, attempts: u64 },

    #[error("internal consistency fault: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
