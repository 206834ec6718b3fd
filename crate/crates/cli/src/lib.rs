//! File-based driver for the `ddpmc` library: simulate scenarios, fit chains,
//! summarize conditional Kendall's tau and compare fits against a truth.
//!
//! Each command takes a JSON configuration document; command-line flags
//! override individual fields. Every run writes a manifest next to its outputs
//! with the configuration, its SHA-256 and the code version.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod grid;
pub mod manifest;

use std::path::{Path, PathBuf};

pub use commands::{cmd_compare, cmd_fit, cmd_simulate, cmd_tau};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const DATA: u8 = 3;
    pub const NUMERICAL: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] ddpmc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(ddpmc::Error::Config(_)) => exit::USAGE,
            CliError::Core(e) if e.is_numerical() => exit::NUMERICAL,
            _ => exit::DATA,
        }
    }

    pub(crate) fn file(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::File { path: path.to_path_buf(), source }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
