//! Pipeline toolkit around `proplang-core`: file formats, the concurrent
//! evaluation driver, the HTTP model client, and everything the `proplang`
//! binary needs.
//!
//! Exit-code convention for the binary: 0 success, 1 I/O failure, 2 data or
//! translation failure, 3 transport failure.

pub mod client;
pub mod config;
pub mod corpus;
pub mod keys;
pub mod reports;
pub mod runner;
pub mod synth;

use std::path::Path;
use std::process::ExitCode;

/// Error with the binary's exit-code mapping baked in.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Transport(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io { .. } => ExitCode::from(1),
            CliError::Data(_) => ExitCode::from(2),
            CliError::Transport(_) => ExitCode::from(3),
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))
}

pub fn write_string(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}
