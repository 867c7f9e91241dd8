//! Declarative experiment runner: JSON configs in, CSV and JSON reports out.

pub mod config;
pub mod resources;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, GraphSelection, OptimizerSettings, RunSpec};
pub use resources::{report_resources, ResourceRow};
pub use runner::{check, run, run_fixture, write_csv, write_report, Entry, Report, Row};
