use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: file not found")]
    NotFound(PathBuf),
    #[error("{path}: malformed header: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("{path}: unsupported bit depth (maxval {maxval}); 8- and 16-bit PGM are supported")]
    UnsupportedDepth { path: PathBuf, maxval: u64 },
    #[error("{path}: pixel data truncated ({got} of {expected} bytes)")]
    Truncated { path: PathBuf, got: usize, expected: usize },
    #[error("{path}: malformed data: {reason}")]
    MalformedData { path: PathBuf, reason: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("configuration conflict: {0}")]
    Conflict(String),
    #[error("simulation failed: {0}")]
    Simulation(#[from] dualphase::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status; every failure class gets its own code.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::NotFound(_) => 3,
            CliError::MalformedHeader { .. } => 4,
            CliError::UnsupportedDepth { .. } => 5,
            CliError::Truncated { .. } | CliError::MalformedData { .. } => 6,
            CliError::Conflict(_) => 7,
            CliError::Simulation(_) => 8,
            CliError::Io { .. } => 9,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::NotFound(path)
        } else {
            CliError::Io { path, source }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
