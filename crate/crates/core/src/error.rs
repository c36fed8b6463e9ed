use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("action {action} is not available in state {state}")]
    InvalidAction { state: usize, action: usize },

    #[error("unknown agent kind `{0}`")]
    UnknownAgent(String),

    #[error("unknown deck `{0}`")]
    UnknownDeck(String),

    #[error("malformed layout: {0}")]
    Layout(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
