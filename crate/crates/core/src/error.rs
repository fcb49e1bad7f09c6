//! Crate-wide error type and the process exit codes the CLI maps it to.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: unparseable expressions, bad fixture files, invalid flags.
    #[error("input error: {0}")]
    Input(String),

    /// A mathematical precondition of the requested operation fails.
    #[error("precondition failure: {0}")]
    Math(String),

    /// An enumeration or tree expansion exceeded the configured node budget.
    #[error("budget exhausted: {0}")]
    Budget(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn math(msg: impl Into<String>) -> Self {
        Error::Math(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    /// Exit code contract: 1 input, 2 mathematical precondition, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Math(_) => 2,
            Error::Budget(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(e.to_string())
    }
}
