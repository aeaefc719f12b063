use thiserror::Error;

/// Failure classes shared by every operation in the crate.
///
/// The CLI maps these to exit codes 2, 3 and 4 respectively.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An internal self-check failed. `context` names the construction step.
    #[error("internal verification failed in {context}: {detail}")]
    Internal { context: String, detail: String },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn internal(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Internal { context: context.into(), detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
