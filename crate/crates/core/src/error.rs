use thiserror::Error;

/// Everything that can go wrong while building instances or running the
/// estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("random element requested from an empty set")]
    EmptySet,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("budget k = {k} exceeds the number of sets n = {n}")]
    BudgetExceedsSets { k: usize, n: usize },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("skew (alpha_l = {alpha_l}, alpha_r = {alpha_r}) is infeasible for a set of {size} elements")]
    InfeasibleSkew { alpha_l: f64, alpha_r: f64, size: u64 },

    #[error("enumeration of {required} subsets exceeds the cap of {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("incompatible backend: {0}")]
    IncompatibleBackend(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A malformed instance file, with the 1-based line where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = CoverError> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> CoverError {
    CoverError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
