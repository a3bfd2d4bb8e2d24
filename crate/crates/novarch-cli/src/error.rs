use std::path::PathBuf;

use thiserror::Error;

/// Everything a run can fail with, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}", path = .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema error at {}: {message}", show_pointer(.pointer))]
    Schema { pointer: String, message: String },
    #[error("invalid input at {}: {message}", show_pointer(.pointer))]
    Invariant { pointer: String, message: String },
    #[error(transparent)]
    Math(#[from] novarch::Error),
}

fn show_pointer(p: &str) -> &str {
    if p.is_empty() {
        "the document root"
    } else {
        p
    }
}

impl CliError {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { pointer: pointer.into(), message: message.into() }
    }

    pub fn invariant(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invariant { pointer: pointer.into(), message: message.into() }
    }

    /// 1 for mathematical failures, 2 for usage, 3 for input problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Parse(_) | CliError::Schema { .. } | CliError::Invariant { .. } => 3,
        }
    }

    /// The JSON pointer into the offending document, when there is one.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            CliError::Schema { pointer, .. } | CliError::Invariant { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}
