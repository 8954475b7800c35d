//! Configuration, orchestration, persistence and comparison.

pub mod audit;
pub mod compare;
pub mod config;
pub mod run;
pub mod sweep;

pub use compare::{compare, comparison, z_score, Comparison, Report, Z_FLAG};
pub use config::{Experiment, ExperimentConfig, FunctionSpec, MethodKind, ProfileRef};
pub use run::{predictions, run, run_dir, Predictions, RunOptions, RunRecord, TableRow};
pub use sweep::{loglog_slope, sweep, Axis, SweepPoint, SweepTable};
