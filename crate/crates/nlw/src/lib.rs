//! Command-line experiments over the `penrose-nlw-core` toolkit: config
//! resolution, rayon-backed ensembles, CSV/JSON reports and the acceptance
//! suite.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod parallel;
pub mod report;
pub mod verify;

pub use config::{ConfigError, Experiment, PartialConfig, RunConfig};
pub use experiments::{run, RunError, RunOutcome};
