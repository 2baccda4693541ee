//! Library half of the command line front end: configuration
//! resolution, file emission and the four commands. The binary in
//! `main.rs` is a thin wrapper so everything here stays testable.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use plcsnet::ErrorClass;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] plcsnet::Error),

    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: plcsnet::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Process exit codes: 0 success, 1 i/o, 2 parse/usage, 3 contract,
/// 4 degenerate or disconnected graph.
impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) | CliError::InFile { source: e, .. } => match e.class() {
                ErrorClass::Parse => 2,
                ErrorClass::Contract => 3,
                ErrorClass::Graph => 4,
            },
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}
