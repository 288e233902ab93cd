//! Error classes and their process exit codes.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    /// Bad configuration; `field` is the dotted path of the offending entry.
    Config { field: String, msg: String },
    /// Numerical failure inside the toolkit.
    Numerical(qplasm::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), msg: msg.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Wraps a toolkit error raised while building the object at `field`.
    pub fn at(field: impl Into<String>, err: qplasm::Error) -> Self {
        CliError::config(field, err.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<qplasm::Error> for CliError {
    fn from(err: qplasm::Error) -> Self {
        if err.is_config() {
            CliError::config(err.op().to_string(), err.to_string())
        } else {
            CliError::Numerical(err)
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "I/O error on {}: {source}", path.display()),
            CliError::Config { field, msg } => write!(f, "config error at `{field}`: {msg}"),
            CliError::Numerical(e) => write!(f, "numerical failure in {}: {e}", e.op()),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
