//! CLI error taxonomy with process exit codes: 0 success / all checks
//! pass, 1 check violation, 2 usage or semantic input error, 3 I/O error.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or semantically invalid input (exit 2).
    Usage(String),
    /// Filesystem or parse failure (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ranking_core::Error> for CliError {
    fn from(e: ranking_core::Error) -> Self {
        match e {
            // unreadable file content is an I/O problem, everything else
            // is a bad request
            ranking_core::Error::Format(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
