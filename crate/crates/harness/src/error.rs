use thiserror::Error;

/// Harness failure, split by exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad arguments, config file or spec string (exit code 2).
    #[error("config error: {0}")]
    Config(String),
    /// Failure while running: I/O, malformed input data, numerical errors (exit code 3).
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

pub(crate) fn runtime(msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Runtime(msg.to_string())
}
