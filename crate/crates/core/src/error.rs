use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search budget exceeded: {what} = {requested} exceeds limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("monotonicity violation: f({left}) >= f({right})")]
    MonotonicityViolation { left: u64, right: u64 },

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("weight index {index} is outside the accessible range {range}")]
    WeightOutOfRange { index: i64, range: String },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
