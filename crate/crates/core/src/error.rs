use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed vertex or ray: {0}")]
    MalformedVertex(String),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("state budget of {budget} exceeded")]
    StateBudget { budget: usize },
    #[error("key budget of {budget} exceeded at n = {n}")]
    KeyBudget { budget: usize, n: usize },
    #[error("inadmissible design target: {0}")]
    Inadmissible(String),
    #[error("precondition violated at x = {witness}: {reason}")]
    Precondition { witness: String, reason: String },
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("missing quotient data at level {0}")]
    MissingQuotient(usize),
    #[error("truncated root group cannot decide a word of length {len} beyond radius {radius}")]
    BeyondRadius { len: usize, radius: usize },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
