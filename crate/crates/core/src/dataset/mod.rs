//! KDD Cup '99 / NSL-KDD connection records: parsing, label taxonomy,
//! one-hot + min-max encoding and stratified subsampling.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use thiserror::Error;

mod encoding;
mod sample;
pub mod synthetic;
mod taxonomy;

pub use encoding::{encode, encode_records, fit_encoding, ColumnEncoding, EncodingMap};
pub use sample::{stratified_indices, stratified_subsample};
pub use taxonomy::{map_label, Taxonomy};

/// Number of feature fields in every KDD connection record.
pub const FEATURE_COUNT: usize = 41;

/// The 41 KDD feature columns, in file order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

/// Columns holding symbolic values (protocol_type, service, flag).
pub const CATEGORICAL_COLUMNS: [usize; 3] = [1, 2, 3];

pub fn is_categorical(column: usize) -> bool {
    CATEGORICAL_COLUMNS.contains(&column)
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record at line {line}: {fields} fields")]
    MalformedRecord { line: usize, fields: usize },
    #[error("empty label at line {line}")]
    EmptyLabel { line: usize },
    #[error("unknown attack label `{0}`; extend the taxonomy file")]
    UnknownLabel(String),
    #[error("non-numeric value `{value}` in numeric column `{column}`")]
    NonNumericValue { column: &'static str, value: String },
    #[error("category `{value}` in column `{column}` cannot be stored (empty or contains whitespace)")]
    InvalidCategory { column: &'static str, value: String },
    #[error("record has {actual} features, encoding expects {expected}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("cannot fit an encoding on zero records")]
    EmptyInput,
    #[error("subsample fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// The five traffic classes, in report order. The order also breaks ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttackClass {
    Normal,
    Dos,
    Probe,
    R2l,
    U2r,
}

impl AttackClass {
    pub const COUNT: usize = 5;
    pub const ALL: [AttackClass; 5] =
        [AttackClass::Normal, AttackClass::Dos, AttackClass::Probe, AttackClass::R2l, AttackClass::U2r];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<AttackClass> {
        Self::ALL.get(i).copied()
    }

    /// Display name used in report tables.
    pub fn name(self) -> &'static str {
        match self {
            AttackClass::Normal => "Normal",
            AttackClass::Dos => "Dos",
            AttackClass::Probe => "Probe",
            AttackClass::R2l => "R2l",
            AttackClass::U2r => "U2r",
        }
    }

    /// Lower-case key used in files.
    pub fn key(self) -> &'static str {
        match self {
            AttackClass::Normal => "normal",
            AttackClass::Dos => "dos",
            AttackClass::Probe => "probe",
            AttackClass::R2l => "r2l",
            AttackClass::U2r => "u2r",
        }
    }

    /// Index of the largest count; ties go to the earliest class.
    pub fn argmax(counts: &[usize; 5]) -> AttackClass {
        let mut best = 0;
        for i in 1..Self::COUNT {
            if counts[i] > counts[best] {
                best = i;
            }
        }
        Self::ALL[best]
    }
}

impl fmt::Display for AttackClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        AttackClass::ALL.into_iter().find(|c| c.key() == lower).ok_or_else(|| format!("unknown attack class `{s}`"))
    }
}

/// Per-class counts in [`AttackClass`] order.
pub fn class_counts(classes: &[AttackClass]) -> [usize; 5] {
    let mut counts = [0; 5];
    for c in classes {
        counts[c.index()] += 1;
    }
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    /// 41 features plus a dotted label (`normal.`).
    Kdd99,
    /// 41 features, a label and an optional difficulty score.
    NslKdd,
}

impl FromStr for RecordFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kdd99" => Ok(RecordFormat::Kdd99),
            "nslkdd" => Ok(RecordFormat::NslKdd),
            other => Err(format!("unknown record format `{other}` (expected kdd99 or nslkdd)")),
        }
    }
}

impl fmt::Display for RecordFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordFormat::Kdd99 => "kdd99",
            RecordFormat::NslKdd => "nslkdd",
        })
    }
}

/// One connection record as read from disk, before any encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRecord {
    pub features: Vec<String>,
    pub label: String,
    /// NSL-KDD difficulty score; never used for modeling.
    pub difficulty: Option<i32>,
}

/// Encoded feature vector with its class.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub class: AttackClass,
}

/// Parses one record per non-empty line. Record `i` of the output is the
/// `i`-th non-blank line of the input.
pub fn parse_records<R: BufRead>(reader: R, format: RecordFormat) -> Result<Vec<RawRecord>, DatasetError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_line(line, idx + 1, format)?);
    }
    Ok(records)
}

fn parse_line(line: &str, line_no: usize, format: RecordFormat) -> Result<RawRecord, DatasetError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let arity_ok = match format {
        RecordFormat::Kdd99 => fields.len() == FEATURE_COUNT + 1,
        RecordFormat::NslKdd => fields.len() == FEATURE_COUNT + 1 || fields.len() == FEATURE_COUNT + 2,
    };
    if !arity_ok {
        return Err(DatasetError::MalformedRecord { line: line_no, fields: fields.len() });
    }
    let label = fields[FEATURE_COUNT].trim_end_matches('.');
    if label.is_empty() {
        return Err(DatasetError::EmptyLabel { line: line_no });
    }
    let difficulty =
        match fields.get(FEATURE_COUNT + 1) {
            Some(d) => Some(d.parse::<i32>().map_err(|_| DatasetError::Format {
                line: line_no,
                msg: format!("difficulty `{d}` is not an integer"),
            })?),
            None => None,
        };
    Ok(RawRecord {
        features: fields[..FEATURE_COUNT].iter().map(|s| s.to_string()).collect(),
        label: label.to_string(),
        difficulty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KDD_LINE: &str = "0,tcp,http,SF,215,45076,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,1,1,0.00,0.00,0.00,0.00,1.00,0.00,0.00,0,0,0.00,0.00,0.00,0.00,0.00,0.00,0.00,0.00,normal.";

    #[test]
    fn kdd99_line_strips_label_dot() {
        let recs = parse_records(KDD_LINE.as_bytes(), RecordFormat::Kdd99).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].label, "normal");
        assert_eq!(recs[0].features.len(), 41);
        assert_eq!(recs[0].features[2], "http");
        assert_eq!(recs[0].difficulty, None);
    }

    #[test]
    fn nslkdd_keeps_difficulty() {
        let line = KDD_LINE.replace("normal.", "neptune,21");
        let recs = parse_records(line.as_bytes(), RecordFormat::NslKdd).unwrap();
        assert_eq!(recs[0].label, "neptune");
        assert_eq!(recs[0].difficulty, Some(21));
    }

    #[test]
    fn wrong_arity_is_malformed() {
        let fields: Vec<&str> = KDD_LINE.split(',').collect();
        let short = fields[2..].join(",");
        let text = format!("{KDD_LINE}\n\n{short}\n");
        match parse_records(text.as_bytes(), RecordFormat::Kdd99) {
            Err(DatasetError::MalformedRecord { line: 3, fields: 40 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // kdd99 does not accept the difficulty column
        let long = format!("{KDD_LINE},3");
        assert!(parse_records(long.as_bytes(), RecordFormat::Kdd99).is_err());
    }

    #[test]
    fn blank_lines_are_skipped_and_order_kept() {
        let second = KDD_LINE.replace("normal.", "smurf.");
        let text = format!("\n{KDD_LINE}\r\n\n{second}\n");
        let recs = parse_records(text.as_bytes(), RecordFormat::Kdd99).unwrap();
        let labels: Vec<_> = recs.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["normal", "smurf"]);
    }

    #[test]
    fn empty_label_rejected() {
        let line = KDD_LINE.replace("normal.", ".");
        assert!(matches!(
            parse_records(line.as_bytes(), RecordFormat::Kdd99),
            Err(DatasetError::EmptyLabel { line: 1 })
        ));
    }

    #[test]
    fn class_order_and_names() {
        assert_eq!(AttackClass::ALL.map(AttackClass::index), [0, 1, 2, 3, 4]);
        assert_eq!("R2L".parse::<AttackClass>().unwrap(), AttackClass::R2l);
        assert_eq!(AttackClass::argmax(&[2, 2, 1, 0, 0]), AttackClass::Normal);
        assert_eq!(AttackClass::argmax(&[0, 1, 3, 3, 0]), AttackClass::Probe);
    }
}
