//! Experiment harness: observed-data generation, pool-size sweeps over
//! sampling methods, and Table-style reports.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{ExperimentConfig, Method, MethodSettings};
pub use experiment::{generate_observed, load_observed, run_experiment, Problem};
pub use report::{aggregate, Aggregate, Report, ReportRow};
