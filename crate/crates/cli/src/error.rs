use std::fmt;
use std::path::{Path, PathBuf};

use ucr_core::Error;

/// Everything a command can fail with, mapped onto the exit codes
/// 2 (bad input), 3 (guard or infeasible configuration) and 4 (broken
/// invariant).
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Usage(String),
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_guard() => 3,
            CliError::Core(Error::Invariant(_)) | CliError::Invariant(_) => 4,
            CliError::Core(_) | CliError::Parse { .. } | CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{}:{line}:{column}: {message}", path.display()),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
