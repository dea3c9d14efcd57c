//! Five-class confusion matrices and the per-class detection measures:
//! accuracy, precision, recall, F-score and false-alarm rate.
//!
//! Per-class figures are one-vs-rest: the class is the positive outcome and
//! the other four classes are negative. A measure whose denominator is zero
//! is `None` (undefined), never 0 or 1.

use thiserror::Error;

use crate::dataset::AttackClass;

mod report;

pub use report::{EvaluationReport, ReferenceTable, ReportError, ReportRow, RowLabel};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no records to evaluate")]
    Empty,
}

/// Rows are the true class, columns the predicted class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[usize; 5]; 5],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[usize; 5]; 5]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn counts(&self) -> &[[usize; 5]; 5] {
        &self.counts
    }

    pub fn get(&self, truth: AttackClass, predicted: AttackClass) -> usize {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn add(&mut self, truth: AttackClass, predicted: AttackClass) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    /// Cell-wise sum, for merging partial tallies.
    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..5).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, class: AttackClass) -> usize {
        self.counts[class.index()].iter().sum()
    }

    pub fn column_sum(&self, class: AttackClass) -> usize {
        self.counts.iter().map(|row| row[class.index()]).sum()
    }

    /// Multiclass accuracy `trace / N`, `None` for an empty matrix.
    pub fn overall_accuracy(&self) -> Option<f64> {
        ratio(self.trace(), self.total())
    }
}

/// Tallies predictions against labels.
pub fn confusion(predictions: &[AttackClass], labels: &[AttackClass]) -> Result<ConfusionMatrix, MetricsError> {
    if predictions.len() != labels.len() {
        return Err(MetricsError::LengthMismatch { predictions: predictions.len(), labels: labels.len() });
    }
    if predictions.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut m = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(labels) {
        m.add(t, p);
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl BinaryCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

impl std::ops::Add for BinaryCounts {
    type Output = BinaryCounts;

    fn add(self, o: BinaryCounts) -> BinaryCounts {
        BinaryCounts { tp: self.tp + o.tp, fp: self.fp + o.fp, tn: self.tn + o.tn, fn_: self.fn_ + o.fn_ }
    }
}

/// One-vs-rest counts for `class`.
pub fn binarize(matrix: &ConfusionMatrix, class: AttackClass) -> BinaryCounts {
    let tp = matrix.get(class, class);
    let fn_ = matrix.row_sum(class) - tp;
    let fp = matrix.column_sum(class) - tp;
    let tn = matrix.total() - tp - fp - fn_;
    BinaryCounts { tp, fp, tn, fn_ }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricSet {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub false_alarm: Option<f64>,
    pub f_score: Option<f64>,
}

impl MetricSet {
    /// Values in report column order: accuracy, precision, recall, F-score,
    /// false alarm.
    pub fn columns(&self) -> [Option<f64>; 5] {
        [self.accuracy, self.precision, self.recall, self.f_score, self.false_alarm]
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(counts: &BinaryCounts) -> MetricSet {
    let BinaryCounts { tp, fp, tn, fn_ } = *counts;
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f_score = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    MetricSet {
        accuracy: ratio(tp + tn, tp + fp + tn + fn_),
        precision,
        recall,
        false_alarm: ratio(fp, fp + tn),
        f_score,
    }
}
