//! Experiment specs, presets, a parallel runner and result persistence
//! for the `ptflab` command.

pub mod runner;
pub mod spec;
pub mod store;

pub use runner::{run, RunOptions, RunReport};
pub use spec::{preset, Budgets, ExperimentSpec, ExponentTable, LemmaJob, Mode, PRESETS};
pub use store::{hash_json, rows_to_csv, strip_timing, write_outputs, CertStore, ResultRow};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ptf_core::Error),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
