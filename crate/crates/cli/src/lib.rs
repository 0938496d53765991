//! Experiment runner for the firm-growth simulator: configuration, presets,
//! seeded runs, re-analysis of saved snapshots and reference tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyze;
pub mod config;
pub mod manifest;
pub mod oracle;
pub mod run;

use std::path::{Path, PathBuf};

pub use config::{parse_config, ConfigError, Experiment, Preset, Resolved, RunSpec, Source};
pub use run::{run, RunSummary, SeedOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] firmgrowth_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 1 for configuration problems, 2 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(firmgrowth_core::Error::Config(_)) => 1,
            _ => 2,
        }
    }
}
