//! Batch front end for `casimir_core`: TOML run configurations, parameter
//! sweeps and delimited-table output.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_document, RunConfig};
pub use run::{execute, Report, Row, Status};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Output could not be written.
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io(_) => exit::IO,
        }
    }
}
