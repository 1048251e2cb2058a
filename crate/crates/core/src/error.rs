use thiserror::Error;

use crate::numbers::Int;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The instance exceeds a configured enumeration cap.
    #[error("instance too large: {what} needs {size}, cap is {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    Invalid(String),

    /// Same as `Uncovered`, for directions in `F_p^n`.
    #[error("no {k}-term progression for directions {directions:?}")]
    UncoveredDirections { k: usize, directions: Vec<Vec<u32>> },

    #[error("base {base} too small, minimal admissible base is {minimal}")]
    BaseTooSmall { base: Int, minimal: Int },

    /// A progression-cover precondition failed; lists the offending differences.
    #[error("no {k}-term progression for differences {differences:?}")]
    Uncovered { k: usize, differences: Vec<Int> },

    #[error("retry budget of {budget} exhausted: {best}")]
    BudgetExhausted { budget: usize, best: String },

    #[error("slope condition violated: {0}")]
    Slope(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("stage `{stage}` failed: {source}")]
    Stage { stage: &'static str, source: Box<Error> },
}

impl Error {
    pub fn too_large(what: &'static str, size: u128, cap: u128) -> Self {
        Error::TooLarge { what, size, cap }
    }

    /// Whether the error reports a verified negative result (an uncovered
    /// difference, an exhausted retry budget) rather than a bad request.
    pub fn is_verified_failure(&self) -> bool {
        match self {
            Error::Uncovered { .. } | Error::UncoveredDirections { .. } | Error::BudgetExhausted { .. } => true,
            Error::Stage { source, .. } => source.is_verified_failure(),
            _ => false,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}
