//! Versioned model bundle: a directory of human-readable text files.
//!
//! ```text
//! <dir>/manifest     ndae-bundle v1: classifier kind, dims, train counts, provenance
//! <dir>/encoding     ndae-encoding v1 (see `EncodingMap`)
//! <dir>/ndae1        ndae-model v1: first NDAE
//! <dir>/ndae2        ndae-model v1: second NDAE
//! <dir>/classifier   ndae-forest v1 or ndae-softmax v1
//! <dir>/checksums    sha256 of each file above
//! ```
//!
//! Floats are written with 17 significant digits so every parameter reads
//! back with the same bit pattern.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::config::sha256_hex;
use super::PipelineError;
use crate::dataset::{AttackClass, EncodingMap};
use crate::forest::{Forest, ForestParams, TreeNode};
use crate::ndae::{FeatureMode, NdaeModel, SoftmaxHead, StackedModel};
use crate::neural::{Activation, DenseLayer, Network};
use crate::textio::{fmt_f64, parse_f64};

pub const BUNDLE_VERSION: &str = "ndae-bundle v1";
const MODEL_VERSION: &str = "ndae-model v1";
const FOREST_VERSION: &str = "ndae-forest v1";
const SOFTMAX_VERSION: &str = "ndae-softmax v1";

pub const BUNDLE_FILES: [&str; 5] = ["manifest", "encoding", "ndae1", "ndae2", "classifier"];

#[derive(Clone, Debug, PartialEq)]
pub enum Classifier {
    Forest(Forest),
    Softmax(SoftmaxHead),
}

impl Classifier {
    pub fn kind(&self) -> &'static str {
        match self {
            Classifier::Forest(_) => "forest",
            Classifier::Softmax(_) => "softmax",
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Classifier::Forest(f) => f.n_features(),
            Classifier::Softmax(h) => h.input_dim(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelBundle {
    pub encoding: EncodingMap,
    pub stacked: StackedModel,
    pub classifier: Classifier,
    /// Training records per class, for the report's training column.
    pub train_counts: [usize; 5],
    /// Config hash, seeds and dataset fingerprints, in key order.
    pub provenance: BTreeMap<String, String>,
}

impl ModelBundle {
    pub fn new(
        encoding: EncodingMap,
        stacked: StackedModel,
        classifier: Classifier,
        train_counts: [usize; 5],
        provenance: BTreeMap<String, String>,
    ) -> Result<ModelBundle, PipelineError> {
        let b = ModelBundle { encoding, stacked, classifier, train_counts, provenance };
        b.check_dims()?;
        Ok(b)
    }

    fn check_dims(&self) -> Result<(), PipelineError> {
        if self.encoding.dimension() != self.stacked.input_dim() {
            return Err(PipelineError::DimensionMismatch {
                what: "NDAE input vs encoding",
                expected: self.encoding.dimension(),
                actual: self.stacked.input_dim(),
            });
        }
        if self.classifier.input_dim() != self.stacked.feature_dim() {
            return Err(PipelineError::DimensionMismatch {
                what: "classifier input vs extracted features",
                expected: self.stacked.feature_dim(),
                actual: self.classifier.input_dim(),
            });
        }
        Ok(())
    }

    /// File name to contents, in bundle order.
    fn render(&self) -> Vec<(&'static str, String)> {
        let mut manifest = String::new();
        let _ = writeln!(manifest, "{BUNDLE_VERSION}");
        let _ = writeln!(manifest, "classifier {}", self.classifier.kind());
        let _ = writeln!(manifest, "feature_mode {}", self.stacked.feature_mode());
        let _ = writeln!(manifest, "input_dim {}", self.stacked.input_dim());
        let _ = writeln!(manifest, "feature_dim {}", self.stacked.feature_dim());
        let counts: Vec<String> = self.train_counts.iter().map(usize::to_string).collect();
        let _ = writeln!(manifest, "train_counts {}", counts.join(" "));
        for (k, v) in &self.provenance {
            let _ = writeln!(manifest, "provenance {k} {v}");
        }

        let mut encoding = Vec::new();
        self.encoding.write_to(&mut encoding).expect("writing to memory");

        let classifier = match &self.classifier {
            Classifier::Forest(f) => render_forest(f),
            Classifier::Softmax(h) => {
                let mut s = format!("{SOFTMAX_VERSION}\n");
                render_layer(&mut s, "layer", h.layer());
                s
            }
        };
        vec![
            ("manifest", manifest),
            ("encoding", String::from_utf8(encoding).expect("encoding is utf-8")),
            ("ndae1", render_ndae(self.stacked.first())),
            ("ndae2", render_ndae(self.stacked.second())),
            ("classifier", classifier),
        ]
    }

    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        std::fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.to_path_buf(), source })?;
        let mut checksums = String::new();
        for (name, body) in self.render() {
            let _ = writeln!(checksums, "{}  {name}", sha256_hex(body.as_bytes()));
            write_file(&dir.join(name), &body)?;
        }
        write_file(&dir.join("checksums"), &checksums)
    }

    pub fn load(dir: &Path) -> Result<ModelBundle, PipelineError> {
        let checksums = read_file(&dir.join("checksums"))?;
        let mut expected = BTreeMap::new();
        for line in checksums.lines().filter(|l| !l.trim().is_empty()) {
            let (hash, name) = line.split_once("  ").ok_or_else(|| PipelineError::Corrupt {
                file: "checksums".into(),
                msg: format!("bad line `{line}`"),
            })?;
            expected.insert(name.trim().to_string(), hash.to_string());
        }
        let mut bodies = BTreeMap::new();
        for name in BUNDLE_FILES {
            let body = read_file(&dir.join(name))?;
            let want = expected
                .get(name)
                .ok_or_else(|| PipelineError::Corrupt { file: name.into(), msg: "no checksum recorded".into() })?;
            if sha256_hex(body.as_bytes()) != *want {
                return Err(PipelineError::Corrupt { file: name.into(), msg: "checksum mismatch".into() });
            }
            bodies.insert(name, body);
        }

        let manifest = Parser::new("manifest", &bodies["manifest"], BUNDLE_VERSION)?;
        let mut kind = None;
        let mut mode = None;
        let mut train_counts = None;
        let mut provenance = BTreeMap::new();
        for (no, parts) in manifest.rest() {
            match parts.as_slice() {
                ["classifier", k] => kind = Some(k.to_string()),
                ["feature_mode", m] => mode = Some(m.parse::<FeatureMode>().map_err(|m| manifest.err(no, m))?),
                ["input_dim", _] | ["feature_dim", _] => {}
                ["train_counts", counts @ ..] if counts.len() == 5 => {
                    let parsed: Option<Vec<usize>> = counts.iter().map(|c| c.parse().ok()).collect();
                    let parsed = parsed.ok_or_else(|| manifest.err(no, "bad train count"))?;
                    train_counts = Some([parsed[0], parsed[1], parsed[2], parsed[3], parsed[4]]);
                }
                ["provenance", k, v @ ..] => {
                    provenance.insert(k.to_string(), v.join(" "));
                }
                _ => return Err(manifest.err(no, "unexpected entry")),
            }
        }
        let kind = kind.ok_or_else(|| manifest.err(0, "missing classifier"))?;
        let mode = mode.ok_or_else(|| manifest.err(0, "missing feature_mode"))?;
        let train_counts = train_counts.ok_or_else(|| manifest.err(0, "missing train_counts"))?;

        let encoding = EncodingMap::read_from(bodies["encoding"].as_bytes())
            .map_err(|e| PipelineError::Corrupt { file: "encoding".into(), msg: e.to_string() })?;
        let first = parse_ndae("ndae1", &bodies["ndae1"])?;
        let second = parse_ndae("ndae2", &bodies["ndae2"])?;
        let stacked = StackedModel::new(first, second, mode)
            .map_err(|e| PipelineError::Corrupt { file: "ndae2".into(), msg: e.to_string() })?;
        let classifier = match kind.as_str() {
            "forest" => Classifier::Forest(parse_forest(&bodies["classifier"])?),
            "softmax" => {
                let p = Parser::new("classifier", &bodies["classifier"], SOFTMAX_VERSION)?;
                let mut lines = p.rest().into_iter().peekable();
                let layer = parse_layer(&p, &mut lines, "layer")?;
                SoftmaxHead::from_layer(layer).map(Classifier::Softmax).map_err(|e| p.err(0, e.to_string()))?
            }
            other => return Err(manifest.err(0, format!("unknown classifier `{other}`"))),
        };
        ModelBundle::new(encoding, stacked, classifier, train_counts, provenance)
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), PipelineError> {
    std::fs::write(path, body).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

fn read_file(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

fn render_layer(s: &mut String, tag: &str, layer: &DenseLayer) {
    let _ = writeln!(s, "{tag} {} {} {}", layer.in_dim(), layer.out_dim(), layer.activation());
    for row in layer.weights().chunks_exact(layer.in_dim()) {
        let vals: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(s, "w {}", vals.join(" "));
    }
    let vals: Vec<String> = layer.biases().iter().map(|v| fmt_f64(*v)).collect();
    let _ = writeln!(s, "b {}", vals.join(" "));
}

fn render_ndae(m: &NdaeModel) -> String {
    let mut s = format!("{MODEL_VERSION}\n");
    let hidden: Vec<String> = m.hidden_dims().iter().map(usize::to_string).collect();
    let _ = writeln!(s, "input_dim {}", m.input_dim());
    let _ = writeln!(s, "hidden {}", hidden.join(" "));
    for layer in m.encoder().layers() {
        render_layer(&mut s, "layer", layer);
    }
    render_layer(&mut s, "reconstructor", m.reconstructor());
    s
}

fn render_tree(s: &mut String, node: &TreeNode) {
    match node {
        TreeNode::Leaf { class, class_counts } => {
            let c = class_counts;
            let _ = writeln!(s, "leaf {} {} {} {} {} {}", class.key(), c[0], c[1], c[2], c[3], c[4]);
        }
        TreeNode::Split { feature, threshold, left, right } => {
            let _ = writeln!(s, "split {feature} {}", fmt_f64(*threshold));
            render_tree(s, left);
            render_tree(s, right);
        }
    }
}

fn render_forest(f: &Forest) -> String {
    let p = f.params();
    let mut s = format!("{FOREST_VERSION}\n");
    let _ = writeln!(s, "n_features {}", f.n_features());
    let _ = writeln!(s, "mtry {}", f.mtry());
    let _ = writeln!(s, "seed {}", f.seed());
    let _ = writeln!(s, "n_trees {}", p.n_trees);
    let _ = writeln!(s, "max_depth {}", p.max_depth.map_or("none".into(), |d| d.to_string()));
    let _ = writeln!(s, "min_samples_split {}", p.min_samples_split);
    let _ = writeln!(s, "mtry_param {}", p.mtry.map_or("auto".into(), |d| d.to_string()));
    let _ = writeln!(s, "bootstrap {}", p.bootstrap);
    for (i, tree) in f.trees().iter().enumerate() {
        let _ = writeln!(s, "tree {i}");
        render_tree(&mut s, tree);
    }
    s
}

/// Line-oriented reader over one bundle file.
struct Parser<'a> {
    file: &'static str,
    lines: Vec<(usize, Vec<&'a str>)>,
}

type LineIter<'a> = std::iter::Peekable<std::vec::IntoIter<(usize, Vec<&'a str>)>>;

impl<'a> Parser<'a> {
    fn new(file: &'static str, body: &'a str, version: &str) -> Result<Parser<'a>, PipelineError> {
        let mut lines = body.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, first)) if first.trim() == version => {}
            Some((_, first)) => {
                return Err(PipelineError::UnsupportedVersion { file: file.into(), found: first.trim().to_string() })
            }
            None => return Err(PipelineError::Corrupt { file: file.into(), msg: "empty file".into() }),
        }
        Ok(Parser { file, lines: lines.map(|(i, l)| (i + 1, l.split_whitespace().collect())).collect() })
    }

    fn rest(&self) -> Vec<(usize, Vec<&'a str>)> {
        self.lines.clone()
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> PipelineError {
        PipelineError::Corrupt { file: self.file.into(), msg: format!("line {line}: {}", msg.into()) }
    }

    fn expect_kv<T: std::str::FromStr>(&self, lines: &mut LineIter<'a>, key: &str) -> Result<T, PipelineError> {
        match lines.next() {
            Some((no, parts)) if parts.len() == 2 && parts[0] == key => {
                parts[1].parse().map_err(|_| self.err(no, format!("bad value for `{key}`")))
            }
            Some((no, _)) => Err(self.err(no, format!("expected `{key}`"))),
            None => Err(self.err(0, format!("missing `{key}`"))),
        }
    }
}

fn parse_floats(p: &Parser<'_>, no: usize, vals: &[&str], expected: usize) -> Result<Vec<f64>, PipelineError> {
    let parsed: Option<Vec<f64>> = vals.iter().map(|v| parse_f64(v)).collect();
    match parsed {
        Some(v) if v.len() == expected && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(p.err(no, format!("expected {expected} finite values"))),
    }
}

fn parse_layer<'a>(p: &Parser<'a>, lines: &mut LineIter<'a>, tag: &str) -> Result<DenseLayer, PipelineError> {
    let (no, head) = lines.next().ok_or_else(|| p.err(0, format!("missing `{tag}`")))?;
    let [t, i, o, a] = head.as_slice() else {
        return Err(p.err(no, format!("expected `{tag} <in> <out> <activation>`")));
    };
    if *t != tag {
        return Err(p.err(no, format!("expected `{tag}`")));
    }
    let in_dim: usize = i.parse().map_err(|_| p.err(no, "bad input dim"))?;
    let out_dim: usize = o.parse().map_err(|_| p.err(no, "bad output dim"))?;
    let act: Activation = a.parse().map_err(|m: String| p.err(no, m))?;
    let mut weights = Vec::with_capacity(in_dim * out_dim);
    for _ in 0..out_dim {
        match lines.next() {
            Some((no, parts)) if parts.first() == Some(&"w") => {
                weights.extend(parse_floats(p, no, &parts[1..], in_dim)?)
            }
            Some((no, _)) => return Err(p.err(no, "expected weight row")),
            None => return Err(p.err(0, "truncated layer")),
        }
    }
    let biases = match lines.next() {
        Some((no, parts)) if parts.first() == Some(&"b") => parse_floats(p, no, &parts[1..], out_dim)?,
        Some((no, _)) => return Err(p.err(no, "expected bias row")),
        None => return Err(p.err(0, "truncated layer")),
    };
    DenseLayer::from_parts(in_dim, out_dim, weights, biases, act).map_err(|e| p.err(no, e.to_string()))
}

fn parse_ndae(file: &'static str, body: &str) -> Result<NdaeModel, PipelineError> {
    let p = Parser::new(file, body, MODEL_VERSION)?;
    let mut lines = p.rest().into_iter().peekable();
    let input_dim: usize = p.expect_kv(&mut lines, "input_dim")?;
    let hidden: Vec<usize> = match lines.next() {
        Some((no, parts)) if parts.first() == Some(&"hidden") => {
            parts[1..].iter().map(|d| d.parse().map_err(|_| p.err(no, "bad hidden dim"))).collect::<Result<_, _>>()?
        }
        _ => return Err(p.err(0, "missing `hidden`")),
    };
    let mut layers = Vec::with_capacity(hidden.len());
    for _ in &hidden {
        layers.push(parse_layer(&p, &mut lines, "layer")?);
    }
    let reconstructor = parse_layer(&p, &mut lines, "reconstructor")?;
    if let Some((no, _)) = lines.next() {
        return Err(p.err(no, "trailing content"));
    }
    let encoder = Network::from_layers(layers).map_err(|e| p.err(0, e.to_string()))?;
    let model = NdaeModel::from_parts(encoder, reconstructor).map_err(|e| p.err(0, e.to_string()))?;
    if model.input_dim() != input_dim || model.hidden_dims() != hidden {
        return Err(p.err(0, "declared dims disagree with layers"));
    }
    Ok(model)
}

fn parse_tree<'a>(p: &Parser<'a>, lines: &mut LineIter<'a>) -> Result<TreeNode, PipelineError> {
    let (no, parts) = lines.next().ok_or_else(|| p.err(0, "truncated tree"))?;
    match parts.as_slice() {
        ["leaf", class, counts @ ..] if counts.len() == 5 => {
            let class: AttackClass = class.parse().map_err(|m: String| p.err(no, m))?;
            let c: Option<Vec<usize>> = counts.iter().map(|v| v.parse().ok()).collect();
            let c = c.ok_or_else(|| p.err(no, "bad leaf counts"))?;
            let class_counts = [c[0], c[1], c[2], c[3], c[4]];
            if AttackClass::argmax(&class_counts) != class {
                return Err(p.err(no, "leaf class is not the majority of its counts"));
            }
            Ok(TreeNode::Leaf { class, class_counts })
        }
        ["split", feature, threshold] => {
            let feature: usize = feature.parse().map_err(|_| p.err(no, "bad feature index"))?;
            let threshold = parse_f64(threshold).filter(|t| t.is_finite()).ok_or_else(|| p.err(no, "bad threshold"))?;
            let left = parse_tree(p, lines)?;
            let right = parse_tree(p, lines)?;
            Ok(TreeNode::Split { feature, threshold, left: Box::new(left), right: Box::new(right) })
        }
        _ => Err(p.err(no, "expected `split` or `leaf`")),
    }
}

fn parse_forest(body: &str) -> Result<Forest, PipelineError> {
    let p = Parser::new("classifier", body, FOREST_VERSION)?;
    let mut lines = p.rest().into_iter().peekable();
    let n_features: usize = p.expect_kv(&mut lines, "n_features")?;
    let mtry: usize = p.expect_kv(&mut lines, "mtry")?;
    let seed: u64 = p.expect_kv(&mut lines, "seed")?;
    let n_trees: usize = p.expect_kv(&mut lines, "n_trees")?;
    let max_depth: String = p.expect_kv(&mut lines, "max_depth")?;
    let min_samples_split: usize = p.expect_kv(&mut lines, "min_samples_split")?;
    let mtry_param: String = p.expect_kv(&mut lines, "mtry_param")?;
    let bootstrap: bool = p.expect_kv(&mut lines, "bootstrap")?;
    let opt = |s: &str, none: &str| -> Result<Option<usize>, PipelineError> {
        if s == none {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| p.err(0, format!("bad value `{s}`")))
        }
    };
    let params = ForestParams {
        n_trees,
        max_depth: opt(&max_depth, "none")?,
        min_samples_split,
        mtry: opt(&mtry_param, "auto")?,
        bootstrap,
    };
    let mut trees = Vec::with_capacity(n_trees);
    for i in 0..n_trees {
        let idx: usize = p.expect_kv(&mut lines, "tree")?;
        if idx != i {
            return Err(p.err(0, format!("expected tree {i}, found {idx}")));
        }
        trees.push(parse_tree(&p, &mut lines)?);
    }
    if let Some((no, _)) = lines.next() {
        return Err(p.err(no, "trailing content"));
    }
    Forest::from_parts(trees, n_features, mtry, seed, params).map_err(|e| p.err(0, e.to_string()))
}
