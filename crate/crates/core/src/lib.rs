//! Network intrusion detection over KDD Cup '99 / NSL-KDD connection records.
//!
//! The pipeline has four stages:
//!
//! 1. [`dataset`] parses record files, maps attack names onto five classes,
//!    one-hot encodes the categorical columns and min-max normalizes the rest.
//! 2. [`ndae`] learns features without labels using two stacked non-symmetric
//!    deep auto-encoders, built on the small dense-network kernel in [`neural`].
//! 3. [`forest`] classifies the learned features with a bagged forest of CART
//!    trees. A soft-max head in [`ndae`] serves as the weaker baseline.
//! 4. [`metrics`] computes per-class accuracy, precision, recall, F-score and
//!    false-alarm rate and renders them as a fixed six-row table.
//!
//! [`pipeline`] ties the stages together behind the `prepare`, `train`, `eval`
//! and `report` commands, with versioned text persistence for every artifact.
//! Everything is deterministic given the configured seeds.

pub mod dataset;
pub mod forest;
pub mod matrix;
pub mod metrics;
pub mod ndae;
pub mod neural;
pub mod pipeline;
mod textio;

pub use dataset::{AttackClass, EncodingMap, LabeledExample, RawRecord, RecordFormat};
pub use forest::{Forest, ForestParams};
pub use matrix::Matrix;
pub use metrics::{ConfusionMatrix, EvaluationReport, MetricSet};
pub use ndae::{FeatureMode, NdaeModel, SoftmaxHead, StackedModel};
pub use neural::{Network, TrainConfig};
