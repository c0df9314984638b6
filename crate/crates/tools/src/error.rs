use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("malformed {what}: {source}")]
    Parse { what: &'static str, source: serde_json::Error },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Numeric(#[from] mss_core::Error),
}

impl ToolError {
    /// 2 for anything the caller can fix, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use mss_core::Error as E;
        match self {
            ToolError::Numeric(E::InvalidArgument { .. } | E::Irregular { .. }) => 2,
            ToolError::Numeric(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
