//! Verification driver behind the `wdvv` binary.
//!
//! Each command takes a [`RunConfig`] and returns either a JSON [`Report`] or a
//! correlator table. Exit codes: 0 when every check passes, 1 when a check
//! fails, 2 for configuration and precondition errors.

pub mod commands;
pub mod config;
pub mod curve;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{cmd_correlators, cmd_curve_validate, cmd_extend, cmd_verify, CorrelatorTable};
pub use config::{ResolvedModel, RunConfig};
pub use report::{Check, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Precondition(#[from] wdvv_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Every error is a configuration or precondition error.
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}
