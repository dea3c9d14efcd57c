//! Six-row evaluation report (five classes plus a micro-averaged total) in
//! a machine-readable text form and a fixed-width table.
//!
//! Machine-readable form (`ndae-report v1`), full precision ratios:
//!
//! ```text
//! ndae-report v1
//! provenance <key> <value>
//! overall_accuracy <ratio>
//! confusion <class> <pred normal> <pred dos> <pred probe> <pred r2l> <pred u2r>
//! row <class|total> n_train <n> n_test <n> tp <n> fp <n> tn <n> fn <n> accuracy <r> precision <r> recall <r> f_score <r> false_alarm <r>
//! reference_name <name>
//! reference <class|total> <accuracy%> <precision%> <recall%> <f_score%> <false_alarm%>
//! ```
//!
//! Undefined ratios are written as `undefined` and rendered as `—`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use super::{binarize, compute_metrics, BinaryCounts, ConfusionMatrix, MetricSet};
use crate::dataset::AttackClass;
use crate::textio::Lines;

const REPORT_HEADER: &str = "ndae-report v1";
const REFERENCE_HEADER: &str = "ndae-reference v1";
const UNDEFINED: &str = "undefined";
/// Rendered placeholder for an undefined measure.
pub const UNDEFINED_CELL: &str = "—";

pub const TABLE_COLUMNS: [&str; 8] =
    ["Attack class", "No. training", "No. attacks", "Accuracy", "Precision", "Recall", "F-score", "False alarm"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("report rows disagree with its confusion matrix: {0}")]
    Inconsistent(String),
}

fn format_err(line: usize, msg: impl Into<String>) -> ReportError {
    ReportError::Format { line, msg: msg.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowLabel {
    Class(AttackClass),
    Total,
}

impl RowLabel {
    pub fn name(self) -> &'static str {
        match self {
            RowLabel::Class(c) => c.name(),
            RowLabel::Total => "Total",
        }
    }

    fn key(self) -> &'static str {
        match self {
            RowLabel::Class(c) => c.key(),
            RowLabel::Total => "total",
        }
    }

    fn parse(s: &str) -> Option<RowLabel> {
        if s == "total" {
            Some(RowLabel::Total)
        } else {
            s.parse().ok().map(RowLabel::Class)
        }
    }

    fn position(self) -> usize {
        match self {
            RowLabel::Class(c) => c.index(),
            RowLabel::Total => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub label: RowLabel,
    pub n_train: usize,
    /// Test records of this class (the "No. attacks" column).
    pub n_test: usize,
    pub counts: BinaryCounts,
    pub metrics: MetricSet,
}

/// Externally supplied figures printed next to the computed ones, in
/// percent, in the same row and column order as the report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTable {
    pub name: String,
    pub rows: [[Option<f64>; 5]; 6],
}

impl ReferenceTable {
    pub fn read_from<R: BufRead>(reader: R) -> Result<ReferenceTable, ReportError> {
        let mut lines = Lines::new(reader);
        if lines.next_line()?.as_deref() != Some(REFERENCE_HEADER) {
            return Err(format_err(lines.line_no(), format!("expected `{REFERENCE_HEADER}`")));
        }
        let mut name = None;
        let mut rows = [[None; 5]; 6];
        let mut seen = [false; 6];
        while let Some(line) = lines.next_line()? {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] == "name" {
                name = Some(parts[1..].join(" "));
                continue;
            }
            let label = RowLabel::parse(parts[0])
                .ok_or_else(|| format_err(lines.line_no(), format!("unknown row `{}`", parts[0])))?;
            if parts.len() != 6 {
                return Err(format_err(lines.line_no(), "expected a row label and 5 values"));
            }
            for (slot, v) in rows[label.position()].iter_mut().zip(&parts[1..]) {
                *slot = parse_value(v).ok_or_else(|| format_err(lines.line_no(), format!("bad value `{v}`")))?;
            }
            seen[label.position()] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(format_err(lines.line_no(), "reference needs all five classes and total"));
        }
        Ok(ReferenceTable { name: name.unwrap_or_else(|| "reference".into()), rows })
    }

    fn write_lines(&self, out: &mut String) {
        let _ = writeln!(out, "reference_name {}", self.name);
        for (pos, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "reference {}", row_label_at(pos).key());
            for v in row {
                let _ = write!(out, " {}", format_value(*v));
            }
            out.push('\n');
        }
    }
}

fn row_label_at(pos: usize) -> RowLabel {
    AttackClass::from_index(pos).map_or(RowLabel::Total, RowLabel::Class)
}

fn format_value(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| x.to_string())
}

fn parse_value(s: &str) -> Option<Option<f64>> {
    if s == UNDEFINED {
        Some(None)
    } else {
        s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some)
    }
}

/// Percent with two decimals, or the undefined marker.
pub fn render_percent(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED_CELL.to_string(), |x| format!("{:.2}", x * 100.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    confusion: ConfusionMatrix,
    rows: Vec<ReportRow>,
    total: ReportRow,
    overall_accuracy: Option<f64>,
    provenance: BTreeMap<String, String>,
    reference: Option<ReferenceTable>,
}

impl EvaluationReport {
    /// One row per class in fixed order plus a total row computed from the
    /// summed one-vs-rest counts.
    pub fn build(matrix: &ConfusionMatrix, train_counts: &[usize; 5]) -> EvaluationReport {
        let rows: Vec<ReportRow> = AttackClass::ALL
            .into_iter()
            .map(|c| {
                let counts = binarize(matrix, c);
                ReportRow {
                    label: RowLabel::Class(c),
                    n_train: train_counts[c.index()],
                    n_test: matrix.row_sum(c),
                    counts,
                    metrics: compute_metrics(&counts),
                }
            })
            .collect();
        let summed = rows.iter().fold(BinaryCounts::default(), |acc, r| acc + r.counts);
        let total = ReportRow {
            label: RowLabel::Total,
            n_train: train_counts.iter().sum(),
            n_test: matrix.total(),
            counts: summed,
            metrics: compute_metrics(&summed),
        };
        EvaluationReport {
            confusion: matrix.clone(),
            rows,
            total,
            overall_accuracy: matrix.overall_accuracy(),
            provenance: BTreeMap::new(),
            reference: None,
        }
    }

    pub fn with_provenance(mut self, key: &str, value: &str) -> Self {
        self.provenance.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_reference(mut self, reference: Option<ReferenceTable>) -> Self {
        self.reference = reference;
        self
    }

    pub fn confusion(&self) -> &ConfusionMatrix {
        &self.confusion
    }

    /// The five class rows in class order.
    pub fn class_rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn row(&self, class: AttackClass) -> &ReportRow {
        &self.rows[class.index()]
    }

    pub fn total(&self) -> &ReportRow {
        &self.total
    }

    /// All six rows in table order.
    pub fn all_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().chain(std::iter::once(&self.total))
    }

    /// Multiclass accuracy, `trace / N`.
    pub fn overall_accuracy(&self) -> Option<f64> {
        self.overall_accuracy
    }

    pub fn provenance(&self) -> &BTreeMap<String, String> {
        &self.provenance
    }

    pub fn reference(&self) -> Option<&ReferenceTable> {
        self.reference.as_ref()
    }

    pub fn train_counts(&self) -> [usize; 5] {
        std::array::from_fn(|i| self.rows[i].n_train)
    }

    pub fn to_machine_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPORT_HEADER}");
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "provenance {k} {v}");
        }
        let _ = writeln!(out, "overall_accuracy {}", format_value(self.overall_accuracy));
        for c in AttackClass::ALL {
            let row = self.confusion.counts()[c.index()];
            let _ = writeln!(out, "confusion {} {} {} {} {} {}", c.key(), row[0], row[1], row[2], row[3], row[4]);
        }
        for r in self.all_rows() {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "row {} n_train {} n_test {} tp {} fp {} tn {} fn {} accuracy {} precision {} recall {} f_score {} false_alarm {}",
                r.label.key(),
                r.n_train,
                r.n_test,
                r.counts.tp,
                r.counts.fp,
                r.counts.tn,
                r.counts.fn_,
                format_value(m.accuracy),
                format_value(m.precision),
                format_value(m.recall),
                format_value(m.f_score),
                format_value(m.false_alarm),
            );
        }
        if let Some(reference) = &self.reference {
            reference.write_lines(&mut out);
        }
        out
    }

    pub fn write_machine<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_machine_string().as_bytes())?;
        w.flush()
    }

    /// Parses a machine-readable report. The stored rows are checked against
    /// a recomputation from the stored confusion matrix.
    pub fn read_machine<R: BufRead>(reader: R) -> Result<EvaluationReport, ReportError> {
        let mut lines = Lines::new(reader);
        if lines.next_line()?.as_deref() != Some(REPORT_HEADER) {
            return Err(format_err(lines.line_no(), format!("expected `{REPORT_HEADER}`")));
        }
        let mut provenance = BTreeMap::new();
        let mut counts = [[0usize; 5]; 5];
        let mut confusion_seen = [false; 5];
        let mut stored_rows: Vec<(usize, Vec<String>)> = Vec::new();
        let mut reference_name = None;
        let mut reference_rows: Vec<(usize, Vec<String>)> = Vec::new();
        while let Some(line) = lines.next_line()? {
            let no = lines.line_no();
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "provenance" if parts.len() >= 3 => {
                    provenance.insert(parts[1].to_string(), parts[2..].join(" "));
                }
                "overall_accuracy" => {}
                "confusion" if parts.len() == 7 => {
                    let class: AttackClass = parts[1].parse().map_err(|m: String| format_err(no, m))?;
                    for (slot, v) in counts[class.index()].iter_mut().zip(&parts[2..]) {
                        *slot = v.parse().map_err(|_| format_err(no, format!("bad count `{v}`")))?;
                    }
                    confusion_seen[class.index()] = true;
                }
                "row" => stored_rows.push((no, parts[1..].iter().map(|s| s.to_string()).collect())),
                "reference_name" => reference_name = Some(parts[1..].join(" ")),
                "reference" => reference_rows.push((no, parts[1..].iter().map(|s| s.to_string()).collect())),
                other => return Err(format_err(no, format!("unexpected entry `{other}`"))),
            }
        }
        if !confusion_seen.iter().all(|&s| s) {
            return Err(format_err(lines.line_no(), "confusion matrix incomplete"));
        }
        if stored_rows.len() != 6 {
            return Err(format_err(lines.line_no(), format!("expected 6 rows, found {}", stored_rows.len())));
        }

        let mut train_counts = [0usize; 5];
        for (no, fields) in &stored_rows[..5] {
            let label = RowLabel::parse(&fields[0]).ok_or_else(|| format_err(*no, "bad row label"))?;
            let n_train = fields
                .get(2)
                .filter(|_| fields.get(1).map(String::as_str) == Some("n_train"))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| format_err(*no, "missing n_train"))?;
            train_counts[label.position().min(4)] = n_train;
        }
        let rebuilt = EvaluationReport::build(&ConfusionMatrix::from_counts(counts), &train_counts);
        let expected = rebuilt.to_machine_string();
        let expected_rows: Vec<&str> = expected.lines().filter_map(|l| l.strip_prefix("row ")).collect();
        for ((no, fields), want) in stored_rows.iter().zip(&expected_rows) {
            if fields.join(" ") != *want {
                return Err(ReportError::Inconsistent(format!("line {no}")));
            }
        }

        let reference = if reference_rows.is_empty() {
            None
        } else {
            let mut text =
                format!("{REFERENCE_HEADER}\nname {}\n", reference_name.unwrap_or_else(|| "reference".into()));
            for (_, fields) in &reference_rows {
                let _ = writeln!(text, "{}", fields.join(" "));
            }
            Some(ReferenceTable::read_from(text.as_bytes())?)
        };
        let mut report = rebuilt.with_reference(reference);
        report.provenance = provenance;
        Ok(report)
    }

    /// Fixed-width table with the six rows in class order then Total.
    /// With a reference attached, each metric cell reads `computed (reference)`.
    pub fn render_table(&self) -> String {
        let mut cells: Vec<[String; 8]> = Vec::with_capacity(6);
        for (pos, r) in self.all_rows().enumerate() {
            let reference = self.reference.as_ref().map(|t| t.rows[pos]);
            let metric = |i: usize| {
                let computed = render_percent(r.metrics.columns()[i]);
                match reference {
                    Some(rr) => {
                        let rv = rr[i].map_or_else(|| UNDEFINED_CELL.to_string(), |v| format!("{v:.2}"));
                        format!("{computed} ({rv})")
                    }
                    None => computed,
                }
            };
            cells.push([
                r.label.name().to_string(),
                r.n_train.to_string(),
                r.n_test.to_string(),
                metric(0),
                metric(1),
                metric(2),
                metric(3),
                metric(4),
            ]);
        }
        let widths: [usize; 8] = std::array::from_fn(|j| {
            cells.iter().map(|row| row[j].chars().count()).chain([TABLE_COLUMNS[j].chars().count()]).max().unwrap_or(0)
        });
        let mut out = String::new();
        if let Some(t) = &self.reference {
            let _ = writeln!(out, "values in percent; ({}) reference in parentheses", t.name);
        }
        let line = |out: &mut String, row: &[String]| {
            for (j, cell) in row.iter().enumerate() {
                if j == 0 {
                    let _ = write!(out, "{:<w$}", cell, w = widths[j]);
                } else {
                    let _ = write!(out, "  {:>w$}", cell, w = widths[j]);
                }
            }
            out.push('\n');
        };
        line(&mut out, &TABLE_COLUMNS.map(String::from));
        let rule_len = widths.iter().sum::<usize>() + 2 * 7;
        out.push_str(&"-".repeat(rule_len));
        out.push('\n');
        for row in &cells {
            line(&mut out, row);
        }
        out.push_str(&"-".repeat(rule_len));
        out.push('\n');
        let _ = writeln!(out, "Overall multiclass accuracy: {}", render_percent(self.overall_accuracy));
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::confusion;
    use AttackClass::*;

    fn sample_matrix() -> ConfusionMatrix {
        ConfusionMatrix::from_counts([
            [50, 2, 1, 0, 0],
            [3, 80, 0, 0, 0],
            [1, 0, 10, 0, 0],
            [4, 0, 0, 2, 0],
            [1, 0, 0, 0, 0],
        ])
    }

    #[test]
    fn perfect_predictions_report() {
        let labels = [Normal, Dos, Probe, R2l, U2r, Dos];
        let report = EvaluationReport::build(&confusion(&labels, &labels).unwrap(), &[1, 2, 3, 4, 5]);
        for r in report.class_rows() {
            assert_eq!(r.metrics.accuracy, Some(1.0));
            assert_eq!(r.metrics.false_alarm, Some(0.0));
        }
        assert_eq!(report.overall_accuracy(), Some(1.0));
        assert_eq!(report.total().n_train, 15);
    }

    #[test]
    fn total_row_aggregates() {
        let m = sample_matrix();
        let report = EvaluationReport::build(&m, &[10, 20, 30, 40, 50]);
        let t = report.total();
        assert_eq!(t.n_test, m.total());
        assert_eq!(t.counts.total(), 5 * m.total());
        assert_eq!(t.counts.tp, m.trace());
        let n_test: usize = report.class_rows().iter().map(|r| r.n_test).sum();
        assert_eq!(n_test, m.total());
        assert_eq!(report.row(U2r).metrics.precision, None);
        assert_eq!(report.row(U2r).metrics.recall, Some(0.0));
    }

    #[test]
    fn machine_round_trip() {
        let reference = ReferenceTable::read_from(include_str!("../../data/reference_sndae.txt").as_bytes()).unwrap();
        let report = EvaluationReport::build(&sample_matrix(), &[10, 20, 30, 40, 50])
            .with_provenance("config_hash", "abc123")
            .with_reference(Some(reference));
        let text = report.to_machine_string();
        let back = EvaluationReport::read_machine(text.as_bytes()).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_machine_string(), text);
    }

    #[test]
    fn tampered_row_is_inconsistent() {
        let report = EvaluationReport::build(&sample_matrix(), &[1, 1, 1, 1, 1]);
        let text = report.to_machine_string().replacen("tp 50", "tp 51", 1);
        assert!(matches!(EvaluationReport::read_machine(text.as_bytes()), Err(ReportError::Inconsistent(_))));
    }

    #[test]
    fn rendered_table_shape() {
        let report = EvaluationReport::build(&sample_matrix(), &[10, 20, 30, 40, 50]);
        let table = report.render_table();
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("Attack class"));
        let names: Vec<&str> = lines[2..8].iter().map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(names, ["Normal", "Dos", "Probe", "R2l", "U2r", "Total"]);
        let u2r: Vec<&str> = lines[6].split_whitespace().collect();
        assert_eq!(u2r.len(), 8);
        assert_eq!(u2r[4], UNDEFINED_CELL);
        assert_eq!(u2r[6], UNDEFINED_CELL);
        assert_ne!(u2r[4], "0.00");
    }

    #[test]
    fn reference_table_parse() {
        let t = ReferenceTable::read_from(include_str!("../../data/reference_dbn.txt").as_bytes()).unwrap();
        assert_eq!(t.name, "DBN");
        assert_eq!(t.rows[5][0], Some(96.85));
        assert!(ReferenceTable::read_from("ndae-reference v1\nnormal 1 2 3 4 5\n".as_bytes()).is_err());
    }
}
