//! Reproducible grid and random search over synthetic tasks.

mod config;
mod log;
mod point;
mod scout;
mod search;
mod task;

use thiserror::Error;

pub use config::{grid_points, GridDim, HyperHpConfig, RangeDim, Scale, SearchDistribution};
pub use log::{
    load_log, log_to_string, read_log, save_log, write_atomic, write_log, Log, LogError, LogHeader,
    SplitInfo, TrialRecord, LOG_SCHEMA_VERSION,
};
pub use point::HpPoint;
pub use scout::{scout_hyper_hps, ScoutReport, ScoutStop};
pub use search::{run_grid_search, run_hpo, run_random_search, run_rounds, split_log};
pub use task::{eval_trial, DimDomain, MeanFunction, ScoringRule, SyntheticTask, TableEntry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HpoError {
    #[error("coordinate `{0}` is not finite")]
    NonFiniteCoordinate(String),
    #[error("dimension `{0}` appears twice")]
    DuplicateDimension(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("HP point out of domain: {0}")]
    OutOfDomain(String),
    #[error("invalid hyper-HP config: {0}")]
    InvalidConfig(String),
    #[error("grid has no dimensions")]
    EmptyGrid,
    #[error("sampling distribution has empty support")]
    EmptySupport,
    #[error("a log needs at least one trial")]
    EmptyLog,
    #[error("invalid log: {0}")]
    InvalidLog(String),
    #[error("cannot split: {0}")]
    Split(String),
}
