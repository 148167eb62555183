//! Scenario files, the end-to-end study pipeline and its output tables.

mod config;
mod study;
mod tables;

pub use config::{Scenario, ScenarioFile, DEFAULT_CONFIG, DEFAULT_PRESET};
pub use study::{
    evaluate_model, run_scenario, run_study, tune, Method, MethodResult, MethodSelection, ScenarioOutcome,
    ScenarioReport, StudyReport, TimeMetrics, TuningRun,
};
pub use tables::{
    aligned_table, damping_header, damping_row, emit_tables, format_eigenvalue, parse_damping_table,
    TableFormat,
};
