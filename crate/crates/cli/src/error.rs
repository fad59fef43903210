use thiserror::Error;

/// Failure of a command, carrying the stable exit code contract:
/// 1 verification or computation failure, 2 input error, 3 I/O error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn failed<E: std::fmt::Display>(e: E) -> Self {
        CliError::Failed(e.to_string())
    }

    pub fn input<E: std::fmt::Display>(e: E) -> Self {
        CliError::Input(e.to_string())
    }
}
