use thiserror::Error;

/// Failures that map to a specific process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, configuration or signatures (exit 1).
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input data (exit 2).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Exit code for an error bubbled up to `main`. Anything unclassified is internal.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CliError>() {
        Some(CliError::Usage(_)) => EXIT_USAGE,
        Some(CliError::Data(_)) => EXIT_DATA,
        None => EXIT_INTERNAL,
    }
}
