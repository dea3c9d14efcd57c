//! End-to-end orchestration: prepare, train, eval and report, plus the file
//! formats that connect them.
//!
//! A prepared-data directory holds:
//!
//! ```text
//! train.matrix  test.matrix    ndae-matrix v1
//! train.labels  test.labels    ndae-labels v1 <rows>, one class key per line
//! encoding                     ndae-encoding v1 sidecar
//! dataset                      ndae-dataset v1: raw-file fingerprints and counts
//! ```
//!
//! `train` writes a model bundle (see [`bundle`]) to `<out>/model` and a
//! training log with losses and wall-clock timings to `<out>/train.log`.
//! `eval` writes `<out>/report.txt` (machine-readable) and
//! `<out>/report.table` (rendered).

use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::DatasetError;
use crate::forest::ForestError;
use crate::matrix::MatrixError;
use crate::metrics::{MetricsError, ReportError};
use crate::neural::NeuralError;

pub mod bundle;
mod commands;
pub mod config;

pub use bundle::{Classifier, ModelBundle};
pub use commands::{
    cmd_eval, cmd_prepare, cmd_report, cmd_train, evaluate, extract_and_classify, prepare_data, read_labels,
    train_classifier, train_models, write_labels, PreparedData, TrainLog, TrainOutcome,
};
pub use config::{ClassifierKind, PipelineConfig};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Dataset { path: PathBuf, source: DatasetError },
    #[error("{}: {source}", path.display())]
    Matrix { path: PathBuf, source: MatrixError },
    #[error("{}: {source}", path.display())]
    Report { path: PathBuf, source: ReportError },
    #[error("{}: line {line}: {msg}", path.display())]
    Labels { path: PathBuf, line: usize, msg: String },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{stage}: {source}")]
    Neural { stage: &'static str, source: NeuralError },
    #[error("forest: {0}")]
    Forest(#[from] ForestError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },
    #[error("{file}: unsupported format version `{found}`")]
    UnsupportedVersion { file: String, found: String },
    #[error("{file}: corrupt bundle file: {msg}")]
    Corrupt { file: String, msg: String },
}
