//! File formats, parallel drivers and the command-line front end for
//! `hyqc-core`.

pub mod cli;
pub mod config;
pub mod output;
pub mod parallel;

use hyqc_core::Error as CoreError;

/// Exit status for bad input: config, flags, grids.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for numerical failures inside the core.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                CoreError::InvalidScan(_)
                | CoreError::OutOfRange { .. }
                | CoreError::BatchTooSmall { .. }
                | CoreError::TooFewResamples(_)
                | CoreError::EmptyBatch
                | CoreError::AlphaTooSmall(_) => EXIT_VALIDATION,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}
