//! Experiment orchestration: JSON configs, sweeps over the library's
//! operations, and report emission.

pub mod config;
pub mod corpus;
pub mod report;
pub mod run;

pub use config::{Budgets, Experiment, ExperimentConfig, MeanWidthKind, Sweeps, Tolerances};
pub use corpus::{cross_polytope, random_bm_triple, random_rational_body, standard_corpus};
pub use report::{emit_report, parse_json_lines, render, Cell, ReportFormat, Row, REPORT_DIGITS};
pub use run::{
    run_convergence, run_counterexample, run_experiment, run_meanwidth_sweep, Check, Report, HARNESS_STREAM,
};
