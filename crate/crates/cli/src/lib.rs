//! Config-driven experiments on top of `ehpo-core`.

pub mod commands;
pub mod config;
pub mod output;

pub use config::{ExperimentConfig, Overrides, CONFIG_SCHEMA};

/// Bad command-line usage; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}
