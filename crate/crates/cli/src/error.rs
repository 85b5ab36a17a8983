use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("engine contract violated: {0}")]
    Engine(#[from] qoct_core::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn invalid(context: &str, err: qoct_core::Error) -> Self {
        CliError::Config(format!("{context}: {err}"))
    }
}
