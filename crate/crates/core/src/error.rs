use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed text input. Lines and columns are 1-based.
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("item index {index} out of range for {m} items")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("enumeration budget exceeded: {required} candidates required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("exact arithmetic range exceeded: {0}")]
    Overflow(String),

    #[error("constraint ({constraint}) violated: {detail}")]
    ConstraintViolation {
        constraint: &'static str,
        detail: String,
    },
}

impl Error {
    /// Errors caused by budgets or solver feasibility rather than by malformed input.
    pub fn is_budget_or_feasibility(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::Precondition(_) | Error::Overflow(_)
        )
    }
}
