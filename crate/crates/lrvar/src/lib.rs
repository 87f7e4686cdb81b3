//! Monte Carlo studies, file formats and the `lrvar` command line for the
//! estimators in [`lrvar_core`].

pub mod cli;
pub mod config;
pub mod harness;
pub mod io;
pub mod manifest;

pub use config::{Experiment, ExperimentConfig, StudyConfig, Target};
pub use harness::{run_experiment, CellError, CellOutcome, MetricRecord};
