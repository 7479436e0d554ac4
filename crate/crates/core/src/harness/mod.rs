//! Configuration, artifact formats, seeded pipelines and reports.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod report;

pub use config::{load_config, ExperimentConfig};
pub use pipeline::{run_pipeline, Manifest, RunOptions, Stage, StageStatus};
pub use report::{emit_report, parse_rows, ReportFormat, ReportRow};
