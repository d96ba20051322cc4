//! CLI error classification and the exit-code contract.
//!
//! Exit codes: 0 success, 1 usage (bad flags / grids), 2 configuration
//! (scenario parse or invariant violations), 3 numerical failure in the
//! underlying model.

use mi_core::MiError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Flag-level misuse: missing required preset flags, bad grids, bad paths.
    Usage(String),
    /// Scenario file problems: parse errors, unknown keys, invariant breaks.
    Config(String),
    /// A numerical procedure in the model failed.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<MiError> for CliError {
    fn from(e: MiError) -> Self {
        match e {
            // model preconditions trace back to scenario values
            MiError::Domain(m) => CliError::Config(m),
            MiError::Numeric(m) => CliError::Numeric(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o failure: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(format!("csv output failure: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
