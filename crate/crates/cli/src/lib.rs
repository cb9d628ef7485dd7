//! Command-line driver for the transmon model hierarchy: TOML run
//! configuration, experiment dispatch with CSV and JSON provenance output,
//! and the runtime benchmark.

pub mod bench;
pub mod config;
pub mod error;
pub mod run;

pub use config::{load_config, parse_config, RunConfig};
pub use error::{CliError, Result};
pub use run::{run_experiment, Experiment};
