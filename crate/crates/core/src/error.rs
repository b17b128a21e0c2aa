use thiserror::Error;

use crate::certify::Rule;
use crate::parser::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable `{0}` occurs more than once")]
    DuplicateVariable(String),
    #[error("equation has no terms")]
    EmptyEquation,
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("group with {size} terms exceeds the subset enumeration limit of {limit}")]
    SubsetLimitExceeded { size: usize, limit: usize },
    #[error("arithmetic overflow while computing {0}")]
    OverflowDetected(String),
    #[error("equation does not have the shape required by {rule}: {reason}")]
    ShapeMismatch { rule: Rule, reason: String },
    #[error("variable `{0}` is not assigned")]
    MissingVariable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn overflow(what: impl Into<String>) -> Self {
        Error::OverflowDetected(what.into())
    }

    pub(crate) fn shape(rule: Rule, reason: impl Into<String>) -> Self {
        Error::ShapeMismatch { rule, reason: reason.into() }
    }
}
