use std::path::{Path, PathBuf};

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const NON_CONVERGENCE: i32 = 2;
    pub const METHOD_DISAGREEMENT: i32 = 3;
    pub const INVARIANT_VIOLATION: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: malformed input: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] wrflow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(wrflow::Error::MethodDisagreement { .. }) => exit::METHOD_DISAGREEMENT,
            _ => exit::INPUT,
        }
    }

    /// Prefixes a validation message with the offending file.
    pub(crate) fn at(self, path: &Path) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            CliError::Core(e) => CliError::Validation(format!("{}: {e}", path.display())),
            other => other,
        }
    }
}
