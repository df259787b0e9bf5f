use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything that stops a command before it can report a result.
///
/// All of these map to exit code 2. Theorem violations are not errors; they
/// come back inside a successful report and map to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hcrevenue::Error),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: hcrevenue::instance::ParseError },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
