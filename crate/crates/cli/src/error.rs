use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const WITNESS_FAILED: i32 = 2;
    pub const CONFORMANCE_FAILED: i32 = 3;
    pub const RESOURCE_CAP: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Usage { field: String, message: String },

    #[error(transparent)]
    Core(#[from] ntic_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{failed} of {total} conformance checks failed")]
    ConformanceFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } | CliError::Io(_) => exit::USAGE,
            CliError::Core(ntic_core::Error::WitnessFailed { .. }) => exit::WITNESS_FAILED,
            CliError::Core(ntic_core::Error::Resource { .. }) => exit::RESOURCE_CAP,
            CliError::Core(_) => exit::USAGE,
            CliError::ConformanceFailed { .. } => exit::CONFORMANCE_FAILED,
        }
    }
}
