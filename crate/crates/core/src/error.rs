use thiserror::Error;

/// Errors shared across the crate. Arithmetic is checked everywhere: an
/// overflow is reported as [`Error::Overflow`], never wrapped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("capacity exceeded: {what} = {value} is over the cap {cap}")]
    Capacity {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("unknown builtin group `{0}`")]
    UnknownBuiltin(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("averaging collapsed: the averaged generator is zero")]
    AveragingCollapsed,

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
