use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::bundle::{Classifier, ModelBundle};
use super::config::{sha256_hex, ClassifierKind, PipelineConfig};
use super::PipelineError;
use crate::dataset::{
    class_counts, encode_records, fit_encoding, parse_records, stratified_indices, AttackClass, EncodingMap, RawRecord,
    Taxonomy,
};
use crate::forest::train_forest;
use crate::matrix::Matrix;
use crate::metrics::{confusion, EvaluationReport, ReferenceTable};
use crate::ndae::{train_softmax_baseline, train_stacked, StackedModel, StackedTraining};

const LABELS_MAGIC: &str = "ndae-labels v1";
const DATASET_HEADER: &str = "ndae-dataset v1";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>, PipelineError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn open(path: &Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path).map(BufReader::new).map_err(io_err(path))
}

pub fn write_labels(path: &Path, labels: &[AttackClass]) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    let mut body = format!("{LABELS_MAGIC} {}\n", labels.len());
    for l in labels {
        body.push_str(l.key());
        body.push('\n');
    }
    w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn read_labels(path: &Path) -> Result<Vec<AttackClass>, PipelineError> {
    let bad = |line: usize, msg: String| PipelineError::Labels { path: path.to_path_buf(), line, msg };
    let mut lines = open(path)?.lines();
    let header = lines.next().transpose().map_err(io_err(path))?.unwrap_or_default();
    let rows: usize = header
        .strip_prefix(LABELS_MAGIC)
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| bad(1, format!("expected `{LABELS_MAGIC} <rows>`")))?;
    let mut labels = Vec::with_capacity(rows);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        labels.push(line.trim().parse::<AttackClass>().map_err(|m| bad(i + 2, m))?);
    }
    if labels.len() != rows {
        return Err(bad(0, format!("header declares {rows} labels, found {}", labels.len())));
    }
    Ok(labels)
}

fn write_matrix(path: &Path, m: &Matrix) -> Result<(), PipelineError> {
    m.write_to(create(path)?).map_err(|source| PipelineError::Matrix { path: path.to_path_buf(), source })
}

fn read_matrix(path: &Path) -> Result<Matrix, PipelineError> {
    Matrix::read_from(open(path)?).map_err(|source| PipelineError::Matrix { path: path.to_path_buf(), source })
}

/// Encoded train and test sets with the encoding and data fingerprints.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedData {
    pub train: Matrix,
    pub train_labels: Vec<AttackClass>,
    pub test: Matrix,
    pub test_labels: Vec<AttackClass>,
    pub encoding: EncodingMap,
    /// Raw-file hashes and record counts, in key order.
    pub fingerprints: BTreeMap<String, String>,
}

struct RawFile {
    records: Vec<RawRecord>,
    classes: Vec<AttackClass>,
    sha256: String,
}

fn load_raw(path: &Path, cfg: &PipelineConfig, taxonomy: &Taxonomy) -> Result<RawFile, PipelineError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let dataset_err = |source| PipelineError::Dataset { path: path.to_path_buf(), source };
    let records = parse_records(&bytes[..], cfg.format).map_err(dataset_err)?;
    let classes =
        records.iter().map(|r| taxonomy.map_label(&r.label)).collect::<Result<Vec<_>, _>>().map_err(dataset_err)?;
    Ok(RawFile { records, classes, sha256: sha256_hex(&bytes) })
}

/// Parses both raw files, subsamples the training set per class, fits the
/// encoding on the selected training records and encodes both sets.
pub fn prepare_data(cfg: &PipelineConfig) -> Result<PreparedData, PipelineError> {
    let owned_taxonomy;
    let taxonomy = match &cfg.taxonomy_path {
        Some(path) => {
            owned_taxonomy = Taxonomy::from_reader(open(path)?)
                .map_err(|source| PipelineError::Dataset { path: path.clone(), source })?;
            &owned_taxonomy
        }
        None => Taxonomy::bundled(),
    };
    let train_raw = load_raw(&cfg.train_path, cfg, taxonomy)?;
    let test_raw = load_raw(&cfg.test_path, cfg, taxonomy)?;
    let train_err = |source| PipelineError::Dataset { path: cfg.train_path.clone(), source };

    let picked =
        stratified_indices(&train_raw.classes, cfg.subsample_fraction, cfg.subsample_seed).map_err(train_err)?;
    let train_records: Vec<RawRecord> = picked.iter().map(|&i| train_raw.records[i].clone()).collect();
    let train_labels: Vec<AttackClass> = picked.iter().map(|&i| train_raw.classes[i]).collect();
    let encoding = fit_encoding(&train_records).map_err(train_err)?;
    let train = encode_records(&train_records, &encoding).map_err(train_err)?;
    let test = encode_records(&test_raw.records, &encoding)
        .map_err(|source| PipelineError::Dataset { path: cfg.test_path.clone(), source })?;

    let mut fingerprints = BTreeMap::new();
    fingerprints.insert("train_sha256".to_string(), train_raw.sha256);
    fingerprints.insert("test_sha256".to_string(), test_raw.sha256);
    fingerprints.insert("train_records".to_string(), train_raw.records.len().to_string());
    fingerprints.insert("train_selected".to_string(), train_records.len().to_string());
    fingerprints.insert("test_records".to_string(), test_raw.records.len().to_string());
    Ok(PreparedData { train, train_labels, test, test_labels: test_raw.classes, encoding, fingerprints })
}

impl PreparedData {
    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        write_matrix(&dir.join("train.matrix"), &self.train)?;
        write_labels(&dir.join("train.labels"), &self.train_labels)?;
        write_matrix(&dir.join("test.matrix"), &self.test)?;
        write_labels(&dir.join("test.labels"), &self.test_labels)?;
        let enc_path = dir.join("encoding");
        let mut w = create(&enc_path)?;
        self.encoding.write_to(&mut w).map_err(io_err(&enc_path))?;
        let mut body = format!("{DATASET_HEADER}\n");
        for (k, v) in &self.fingerprints {
            let _ = writeln!(body, "{k} {v}");
        }
        let ds_path = dir.join("dataset");
        std::fs::write(&ds_path, body).map_err(io_err(&ds_path))
    }

    pub fn load(dir: &Path) -> Result<PreparedData, PipelineError> {
        let enc_path = dir.join("encoding");
        let encoding = EncodingMap::read_from(open(&enc_path)?)
            .map_err(|source| PipelineError::Dataset { path: enc_path.clone(), source })?;
        let ds_path = dir.join("dataset");
        let text = std::fs::read_to_string(&ds_path).map_err(io_err(&ds_path))?;
        let mut lines = text.lines();
        if lines.next() != Some(DATASET_HEADER) {
            return Err(PipelineError::UnsupportedVersion {
                file: ds_path.display().to_string(),
                found: text.lines().next().unwrap_or("").to_string(),
            });
        }
        let fingerprints =
            lines.filter_map(|l| l.split_once(' ')).map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let data = PreparedData {
            train: read_matrix(&dir.join("train.matrix"))?,
            train_labels: read_labels(&dir.join("train.labels"))?,
            test: read_matrix(&dir.join("test.matrix"))?,
            test_labels: read_labels(&dir.join("test.labels"))?,
            encoding,
            fingerprints,
        };
        for (what, m, labels) in
            [("train labels", &data.train, &data.train_labels), ("test labels", &data.test, &data.test_labels)]
        {
            if m.rows() != labels.len() {
                return Err(PipelineError::DimensionMismatch { what, expected: m.rows(), actual: labels.len() });
            }
            if m.cols() != data.encoding.dimension() {
                return Err(PipelineError::DimensionMismatch {
                    what: "matrix width vs encoding",
                    expected: data.encoding.dimension(),
                    actual: m.cols(),
                });
            }
        }
        Ok(data)
    }
}

/// `prepare`: encodes the configured raw files into `out_dir`.
pub fn cmd_prepare(cfg: &PipelineConfig, out_dir: &Path) -> Result<PreparedData, PipelineError> {
    let data = prepare_data(cfg)?;
    data.save(out_dir)?;
    Ok(data)
}

/// Losses and timings of one training run. Timings are not part of the
/// bundle, which stays byte-identical across runs.
#[derive(Clone, Debug)]
pub struct TrainLog {
    pub stacked: StackedTraining,
    pub timings: Vec<(&'static str, Duration)>,
}

impl TrainLog {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (name, t) in [("ndae1", &self.stacked.first), ("ndae2", &self.stacked.second)] {
            let _ = writeln!(s, "{name} initial_mse {}", t.initial_mse);
            for (i, loss) in t.loss_curve.iter().enumerate() {
                let _ = writeln!(s, "{name} epoch {} loss {loss}", i + 1);
            }
            let _ = writeln!(s, "{name} final_mse {}", t.final_mse);
        }
        for (stage, d) in &self.timings {
            let _ = writeln!(s, "time {stage} {:.3}s", d.as_secs_f64());
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub bundle: ModelBundle,
    pub log: TrainLog,
}

pub fn train_classifier(
    cfg: &PipelineConfig,
    kind: ClassifierKind,
    features: &Matrix,
    labels: &[AttackClass],
) -> Result<Classifier, PipelineError> {
    Ok(match kind {
        ClassifierKind::Forest => Classifier::Forest(train_forest(features, labels, &cfg.forest, cfg.forest_seed)?),
        ClassifierKind::Softmax => {
            let (head, _) = train_softmax_baseline(features, labels, &cfg.softmax)
                .map_err(|source| PipelineError::Neural { stage: "softmax head", source })?;
            Classifier::Softmax(head)
        }
    })
}

/// Unsupervised stacked-NDAE training followed by the configured classifier
/// on the extracted training features.
pub fn train_models(cfg: &PipelineConfig, data: &PreparedData) -> Result<TrainOutcome, PipelineError> {
    let mut timings = Vec::new();
    let start = Instant::now();
    let stacked = train_stacked(&data.train, &cfg.dims1, &cfg.dims2, &cfg.ndae, cfg.feature_mode)
        .map_err(|source| PipelineError::Neural { stage: "stacked NDAE training", source })?;
    timings.push(("ndae", start.elapsed()));

    let start = Instant::now();
    let features = stacked
        .model
        .extract_matrix(&data.train)
        .map_err(|source| PipelineError::Neural { stage: "feature extraction", source })?;
    timings.push(("extract", start.elapsed()));

    let start = Instant::now();
    let classifier = train_classifier(cfg, cfg.classifier, &features, &data.train_labels)?;
    timings.push(("classifier", start.elapsed()));

    let mut provenance = data.fingerprints.clone();
    provenance.insert("config_hash".into(), cfg.hash());
    provenance.insert("seed.subsample".into(), cfg.subsample_seed.to_string());
    provenance.insert("seed.ndae".into(), cfg.ndae.seed.to_string());
    provenance.insert("seed.forest".into(), cfg.forest_seed.to_string());
    provenance.insert("seed.softmax".into(), cfg.softmax.seed.to_string());
    let bundle = ModelBundle::new(
        data.encoding.clone(),
        stacked.model.clone(),
        classifier,
        class_counts(&data.train_labels),
        provenance,
    )?;
    Ok(TrainOutcome { bundle, log: TrainLog { stacked, timings } })
}

/// `train`: trains on `<data_dir>` and writes `<out_dir>/model` and
/// `<out_dir>/train.log`.
pub fn cmd_train(cfg: &PipelineConfig, data_dir: &Path, out_dir: &Path) -> Result<TrainOutcome, PipelineError> {
    let data = PreparedData::load(data_dir)?;
    let outcome = train_models(cfg, &data)?;
    outcome.bundle.save(&out_dir.join("model"))?;
    let log_path = out_dir.join("train.log");
    std::fs::write(&log_path, outcome.log.render()).map_err(io_err(&log_path))?;
    Ok(outcome)
}

/// Predicted classes for already-encoded rows.
pub fn extract_and_classify(
    stacked: &StackedModel,
    classifier: &Classifier,
    encoded: &Matrix,
) -> Result<Vec<AttackClass>, PipelineError> {
    if encoded.cols() != stacked.input_dim() {
        return Err(PipelineError::DimensionMismatch {
            what: "encoded matrix width",
            expected: stacked.input_dim(),
            actual: encoded.cols(),
        });
    }
    let features = stacked
        .extract_matrix(encoded)
        .map_err(|source| PipelineError::Neural { stage: "feature extraction", source })?;
    match classifier {
        Classifier::Forest(f) => Ok(f.predict_matrix(&features)?),
        Classifier::Softmax(h) => (0..features.rows())
            .map(|i| h.predict(features.row(i)))
            .collect::<Result<_, _>>()
            .map_err(|source| PipelineError::Neural { stage: "soft-max prediction", source }),
    }
}

pub fn evaluate(
    bundle: &ModelBundle,
    encoded: &Matrix,
    labels: &[AttackClass],
) -> Result<EvaluationReport, PipelineError> {
    let predictions = extract_and_classify(&bundle.stacked, &bundle.classifier, encoded)?;
    let matrix = confusion(&predictions, labels)?;
    let mut report = EvaluationReport::build(&matrix, &bundle.train_counts);
    for (k, v) in &bundle.provenance {
        report = report.with_provenance(k, v);
    }
    Ok(report.with_provenance("classifier", bundle.classifier.kind()))
}

fn load_reference(path: Option<&Path>) -> Result<Option<ReferenceTable>, PipelineError> {
    path.map(|p| {
        ReferenceTable::read_from(open(p)?).map_err(|source| PipelineError::Report { path: p.to_path_buf(), source })
    })
    .transpose()
}

/// `eval`: scores a bundle on an encoded matrix and writes
/// `<out_dir>/report.txt` and `<out_dir>/report.table`.
pub fn cmd_eval(
    model_dir: &Path,
    matrix_path: &Path,
    labels_path: &Path,
    reference: Option<&Path>,
    out_dir: &Path,
) -> Result<EvaluationReport, PipelineError> {
    let bundle = ModelBundle::load(model_dir)?;
    let encoded = read_matrix(matrix_path)?;
    let labels = read_labels(labels_path)?;
    if labels.len() != encoded.rows() {
        return Err(PipelineError::DimensionMismatch {
            what: "label count",
            expected: encoded.rows(),
            actual: labels.len(),
        });
    }
    let report = evaluate(&bundle, &encoded, &labels)?.with_reference(load_reference(reference)?);
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let machine: PathBuf = out_dir.join("report.txt");
    std::fs::write(&machine, report.to_machine_string()).map_err(io_err(&machine))?;
    let table = out_dir.join("report.table");
    std::fs::write(&table, report.render_table()).map_err(io_err(&table))?;
    Ok(report)
}

/// `report`: re-renders a machine-readable report, optionally with a
/// different reference column.
pub fn cmd_report(report_path: &Path, reference: Option<&Path>) -> Result<String, PipelineError> {
    let mut report = EvaluationReport::read_machine(open(report_path)?)
        .map_err(|source| PipelineError::Report { path: report_path.to_path_buf(), source })?;
    if reference.is_some() {
        report = report.with_reference(load_reference(reference)?);
    }
    Ok(report.render_table())
}
