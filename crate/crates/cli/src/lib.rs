//! Experiment configuration and runner behind the `splitq` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use run::{run_experiment, run_experiment_with, Manifest, RunError, RunOptions};
