use std::path::PathBuf;

use thiserror::Error;

use crate::io::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {error}", path.display())]
    Parse { path: PathBuf, error: ParseError },

    #[error("association: {0}")]
    Association(String),

    #[error("{0}")]
    Core(#[from] trajkit::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{}: {message}", path.display())]
    Data { path: PathBuf, message: String },
}

impl CliError {
    /// 3 for degenerate data, 2 for every other input problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_degenerate() => 3,
            _ => 2,
        }
    }
}
