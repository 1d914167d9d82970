//! Seeded experiment runner, run records and acceptance report for `smoothboost`.

pub mod config;
pub mod constants;
pub mod experiments;
pub mod record;
pub mod report;

pub use config::{Experiment, ExperimentConfig, Format, TieRuleArg};
pub use constants::Constants;
pub use experiments::{execute, run};
pub use record::{Check, RunRecord};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] smoothboost::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("records from different versions: {first} vs {second}")]
    VersionMismatch { first: String, second: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
