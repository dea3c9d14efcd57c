//! One-hot encoding of the symbolic columns and min-max scaling of the
//! numeric ones, fitted on training records.
//!
//! Policy at encode time:
//! - a category never seen in training encodes as an all-zero group;
//! - constant numeric columns (min == max) encode as 0.0;
//! - numeric values outside the training range clamp to [0, 1].

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::{is_categorical, DatasetError, RawRecord, FEATURE_COUNT, FEATURE_NAMES};
use crate::matrix::Matrix;
use crate::textio::{fmt_f64, parse_f64, Lines};

const ENCODING_HEADER: &str = "ndae-encoding v1";

#[derive(Clone, Debug, PartialEq)]
pub enum ColumnEncoding {
    Numeric {
        min: f64,
        max: f64,
    },
    /// Sorted, duplicate-free category list.
    Categorical {
        categories: Vec<String>,
    },
}

impl ColumnEncoding {
    pub fn width(&self) -> usize {
        match self {
            ColumnEncoding::Numeric { .. } => 1,
            ColumnEncoding::Categorical { categories } => categories.len(),
        }
    }
}

/// Fitted per-column encoding, one entry per KDD feature column.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingMap {
    columns: Vec<ColumnEncoding>,
}

impl EncodingMap {
    pub fn columns(&self) -> &[ColumnEncoding] {
        &self.columns
    }

    /// Length of every encoded feature vector.
    pub fn dimension(&self) -> usize {
        self.columns.iter().map(ColumnEncoding::width).sum()
    }

    /// Offset of `column`'s first value inside an encoded vector.
    pub fn offset(&self, column: usize) -> usize {
        self.columns[..column].iter().map(ColumnEncoding::width).sum()
    }

    /// Recovers the category string from a one-hot group, or `None` for an
    /// all-zero group or a numeric column.
    pub fn decode_category<'a>(&'a self, encoded: &[f64], column: usize) -> Option<&'a str> {
        let ColumnEncoding::Categorical { categories } = &self.columns[column] else {
            return None;
        };
        let start = self.offset(column);
        let group = &encoded[start..start + categories.len()];
        group.iter().position(|&v| v == 1.0).map(|i| categories[i].as_str())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{ENCODING_HEADER}")?;
        writeln!(w, "columns {}", self.columns.len())?;
        for (name, col) in FEATURE_NAMES.iter().zip(&self.columns) {
            match col {
                ColumnEncoding::Numeric { min, max } => {
                    writeln!(w, "numeric {name} {} {}", fmt_f64(*min), fmt_f64(*max))?
                }
                ColumnEncoding::Categorical { categories } => {
                    writeln!(w, "categorical {name} {}", categories.join(" "))?
                }
            }
        }
        w.flush()
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<EncodingMap, DatasetError> {
        let mut lines = Lines::new(reader);
        let err = |line: usize, msg: String| DatasetError::Format { line, msg };
        match lines.next_line()? {
            Some(h) if h == ENCODING_HEADER => {}
            other => return Err(err(lines.line_no(), format!("expected `{ENCODING_HEADER}`, got {other:?}"))),
        }
        let count =
            lines.next_line()?.and_then(|l| l.strip_prefix("columns ").and_then(|n| n.trim().parse::<usize>().ok()));
        if count != Some(FEATURE_COUNT) {
            return Err(err(lines.line_no(), format!("expected `columns {FEATURE_COUNT}`")));
        }
        let mut columns = Vec::with_capacity(FEATURE_COUNT);
        for (idx, name) in FEATURE_NAMES.iter().enumerate() {
            let line = lines.next_line()?.ok_or_else(|| err(lines.line_no(), format!("missing column `{name}`")))?;
            let mut parts = line.split_whitespace();
            let kind = parts.next();
            if parts.next() != Some(*name) {
                return Err(err(lines.line_no(), format!("expected column `{name}`")));
            }
            let col = match kind {
                Some("numeric") if !is_categorical(idx) => {
                    let min = parts.next().and_then(parse_f64);
                    let max = parts.next().and_then(parse_f64);
                    match (min, max, parts.next()) {
                        (Some(min), Some(max), None) if min <= max => ColumnEncoding::Numeric { min, max },
                        _ => return Err(err(lines.line_no(), "expected `<min> <max>` with min <= max".into())),
                    }
                }
                Some("categorical") if is_categorical(idx) => {
                    let categories: Vec<String> = parts.map(str::to_string).collect();
                    if categories.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(err(lines.line_no(), "categories must be sorted and unique".into()));
                    }
                    ColumnEncoding::Categorical { categories }
                }
                _ => return Err(err(lines.line_no(), format!("wrong column kind for `{name}`"))),
            };
            columns.push(col);
        }
        if lines.next_line()?.is_some() {
            return Err(err(lines.line_no(), "trailing content".into()));
        }
        Ok(EncodingMap { columns })
    }
}

fn parse_numeric(column: usize, value: &str) -> Result<f64, DatasetError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DatasetError::NonNumericValue { column: FEATURE_NAMES[column], value: value.to_string() }),
    }
}

fn check_arity(record: &RawRecord) -> Result<(), DatasetError> {
    if record.features.len() != FEATURE_COUNT {
        return Err(DatasetError::ArityMismatch { expected: FEATURE_COUNT, actual: record.features.len() });
    }
    Ok(())
}

/// Single pass over the training records collecting category sets and
/// numeric ranges.
pub fn fit_encoding(records: &[RawRecord]) -> Result<EncodingMap, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let mut sets: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); FEATURE_COUNT];
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); FEATURE_COUNT];
    for record in records {
        check_arity(record)?;
        for (col, value) in record.features.iter().enumerate() {
            if is_categorical(col) {
                if value.is_empty() || value.chars().any(char::is_whitespace) {
                    return Err(DatasetError::InvalidCategory { column: FEATURE_NAMES[col], value: value.clone() });
                }
                sets[col].insert(value);
            } else {
                let v = parse_numeric(col, value)?;
                let r = &mut ranges[col];
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
    }
    let columns = (0..FEATURE_COUNT)
        .map(|col| {
            if is_categorical(col) {
                ColumnEncoding::Categorical { categories: sets[col].iter().map(|s| s.to_string()).collect() }
            } else {
                ColumnEncoding::Numeric { min: ranges[col].0, max: ranges[col].1 }
            }
        })
        .collect();
    Ok(EncodingMap { columns })
}

/// Encodes one record into a vector of length `map.dimension()`.
pub fn encode(record: &RawRecord, map: &EncodingMap) -> Result<Vec<f64>, DatasetError> {
    check_arity(record)?;
    let mut out = Vec::with_capacity(map.dimension());
    for (col, (value, enc)) in record.features.iter().zip(&map.columns).enumerate() {
        match enc {
            ColumnEncoding::Numeric { min, max } => {
                let v = parse_numeric(col, value)?;
                let scaled = if max > min { ((v - min) / (max - min)).clamp(0.0, 1.0) } else { 0.0 };
                out.push(scaled);
            }
            ColumnEncoding::Categorical { categories } => {
                let hit = categories.binary_search_by(|c| c.as_str().cmp(value)).ok();
                out.extend((0..categories.len()).map(|i| if Some(i) == hit { 1.0 } else { 0.0 }));
            }
        }
    }
    Ok(out)
}

/// Encodes every record in parallel. Row `i` of the result is record `i`;
/// on failure the error of the lowest failing record is returned.
pub fn encode_records(records: &[RawRecord], map: &EncodingMap) -> Result<Matrix, DatasetError> {
    let encoded: Vec<Result<Vec<f64>, DatasetError>> = records.par_iter().map(|r| encode(r, map)).collect();
    let mut data = Vec::with_capacity(records.len() * map.dimension());
    for row in encoded {
        data.extend(row?);
    }
    Ok(Matrix::from_vec(records.len(), map.dimension(), data).expect("encoded rows have fixed width"))
}
