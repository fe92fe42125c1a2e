//! Seeded experiment harness: test families, named experiments and reports.
//!
//! Every identity and boundedness statement is checked numerically on a
//! seeded family of random Hermite expansions. Boundedness is reported as
//! per-function norm ratios with grid-stability and scaling checks, since
//! no explicit constants are available.

mod config;
mod experiments;
mod family;
mod report;

pub use config::{ExperimentConfig, OutputFormat, Tolerances};
pub use experiments::{
    experiment_list, kernel_moments, orthonormality_defect, run_experiment, run_many, verify_all, ExperimentInfo,
    EXPERIMENTS, RESERVED_NAMESPACES,
};
pub use family::{gen_family, stream_rng};
pub use report::{
    blob_hash, csv_values, emit_report, fmt17, max_of, render, CaseResult, Check, Metadata, Provenance, Report,
    TheoremReport, CSV_HEADER,
};
