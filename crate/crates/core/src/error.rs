use thiserror::Error;

/// Errors raised on rejected input. Validation failures of whole models are
/// reported through [`crate::models::ValidationReport`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("state {state} out of range for carrier of size {size}")]
    OutOfRange { state: usize, size: usize },
    #[error("carrier size mismatch: {0} vs {1}")]
    CarrierMismatch(usize, usize),
    #[error("carrier of size {size} exceeds the configured cap {cap}")]
    CarrierTooLarge { size: usize, cap: usize },
    #[error("empty set in subbasis")]
    EmptySubbasisMember,
    #[error("set is not open: {0}")]
    NotOpen(String),
    #[error("empty group")]
    EmptyGroup,
    #[error("empty list")]
    EmptyList,
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("group `{0}` is not available in this model")]
    GroupUnavailable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("relation is not a preorder")]
    NotPreorder,
    #[error("relation is not max-dense")]
    NotMaxDense,
    #[error("pseudo-model is not standard: {0}")]
    NotStandard(String),
    #[error("invalid model: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
