//! Benchmark orchestration: configuration, seeded sweeps over methods,
//! sizes and layer counts, CSV persistence and figure reports.

pub mod config;
pub mod records;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, ObjectiveMode};
pub use records::{emit_csv, read_csv, read_records, write_records, COLUMNS};
pub use report::{aggregate, emit_report, AggregateRow};
pub use run::{cells, instance_seed, optimizer_seed, run_cell, run_experiment, RunRecord, THREADS_ENV};
