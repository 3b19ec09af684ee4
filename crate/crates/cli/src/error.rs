use serde_json::Value;

/// Exit status for successful runs.
pub const EXIT_OK: i32 = 0;
/// Replay found a difference.
pub const EXIT_MISMATCH: i32 = 1;
/// Bad flags, unreadable inputs, or inputs violating a precondition.
pub const EXIT_VALIDATION: i32 = 2;
/// A search or enumeration ran out of budget.
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Core(#[from] locglob::Error),
    #[error("replay mismatch")]
    Mismatch(Value),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::Core(locglob::Error::BudgetExceeded(_) | locglob::Error::RetryExhausted(_)) => {
                EXIT_BUDGET
            }
            CliError::Core(_) => EXIT_VALIDATION,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            msg: err.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("malformed configuration: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
