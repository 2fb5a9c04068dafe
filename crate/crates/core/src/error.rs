//! One error type for the whole crate; variants name the contract that broke.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A point or descriptor does not belong to the space it was used with.
    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    /// A selector or search ran past its bound without finding a witness.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    /// A precondition on an operation's input was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A witness table or battery lacks an entry the construction needs.
    #[error("missing witness: {0}")]
    MissingWitness(String),

    /// Registry or scenario file could not be interpreted.
    #[error("format error: {0}")]
    Format(String),

    /// The descriptor algebra cannot express a required set for this space.
    #[error("unsupported for this space: {0}")]
    Unsupported(String),

    /// A strategy produced a move the game rules reject.
    #[error("illegal move at round {round}: {reason}")]
    IllegalMove { round: usize, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::TypeMismatch(msg.into())
    }
    pub fn exhausted(msg: impl Into<String>) -> Self {
        Error::SearchExhausted(msg.into())
    }
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
