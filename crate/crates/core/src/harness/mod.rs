//! Scenario files, run loop, sweeps, cross-validation and report output.

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;
pub mod validate;

pub use config::{load_scenario, ModelConfig, ScenarioConfig, SolverChoice};
pub use report::{write_report, write_series_csv, write_sweep_csv, CSV_HEADER};
pub use run::{run, Bounds, Prepared, Provenance, RunReport, SolverKind, SolverOutcome};
pub use sweep::{sweep, Axis, SweepRow};
pub use validate::{cross_validate, CrossValidation, Discrepancy};
