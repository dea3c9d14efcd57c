//! Flat `key = value` pipeline configuration with `#` comments.
//!
//! ```text
//! # data
//! train_path = data/kddcup.data_10_percent
//! test_path = data/corrected
//! format = kdd99
//! subsample_fraction = 0.1
//! subsample_seed = 7
//! # feature learning
//! dims1 = 32,32,32
//! dims2 = 32,32,32
//! ndae_seed = 7
//! # classifier
//! classifier = forest
//! forest_seed = 7
//! softmax_seed = 7
//! ```
//!
//! Relative paths resolve against the directory holding the config file.
//! Every seed must be given explicitly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::dataset::RecordFormat;
use crate::forest::ForestParams;
use crate::ndae::FeatureMode;
use crate::neural::TrainConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifierKind {
    Forest,
    Softmax,
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forest" => Ok(ClassifierKind::Forest),
            "softmax" => Ok(ClassifierKind::Softmax),
            other => Err(format!("unknown classifier `{other}` (expected forest or softmax)")),
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassifierKind::Forest => "forest",
            ClassifierKind::Softmax => "softmax",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub train_path: PathBuf,
    pub test_path: PathBuf,
    pub format: RecordFormat,
    pub taxonomy_path: Option<PathBuf>,
    pub subsample_fraction: f64,
    pub subsample_seed: u64,
    pub dims1: Vec<usize>,
    pub dims2: Vec<usize>,
    pub feature_mode: FeatureMode,
    pub ndae: TrainConfig,
    pub classifier: ClassifierKind,
    pub forest: ForestParams,
    pub forest_seed: u64,
    pub softmax: TrainConfig,
}

const KEYS: &[&str] = &[
    "train_path",
    "test_path",
    "format",
    "taxonomy_path",
    "subsample_fraction",
    "subsample_seed",
    "dims1",
    "dims2",
    "feature_mode",
    "learning_rate",
    "epochs",
    "batch_size",
    "ndae_seed",
    "classifier",
    "n_trees",
    "max_depth",
    "min_samples_split",
    "mtry",
    "forest_seed",
    "softmax_learning_rate",
    "softmax_epochs",
    "softmax_batch_size",
    "softmax_seed",
];

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.values.get(key)
    }

    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T, PipelineError> {
        match self.raw(key) {
            Some((line, v)) => v
                .parse()
                .map_err(|_| PipelineError::Config { line: *line, msg: format!("invalid value `{v}` for `{key}`") }),
            None => {
                default.ok_or_else(|| PipelineError::Config { line: 0, msg: format!("missing required key `{key}`") })
            }
        }
    }

    fn dims(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, PipelineError> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let dims: Option<Vec<usize>> = v.split(',').map(|d| d.trim().parse().ok().filter(|&d| d > 0)).collect();
        match dims {
            Some(d) if !d.is_empty() => Ok(d),
            _ => Err(PipelineError::Config {
                line: *line,
                msg: format!("`{key}` must be a comma-separated list of positive integers"),
            }),
        }
    }

    fn optional_count(&self, key: &str, none_word: &str) -> Result<Option<usize>, PipelineError> {
        match self.raw(key) {
            None => Ok(None),
            Some((_, v)) if v == none_word => Ok(None),
            Some(_) => self.get::<usize>(key, None).map(Some),
        }
    }
}

pub(crate) fn default_dims() -> Vec<usize> {
    vec![32, 32, 32]
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<PipelineConfig, PipelineError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(PipelineError::Config {
                    line: line_no,
                    msg: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(PipelineError::Config { line: line_no, msg: format!("unknown key `{k}`") });
            }
            if values.insert(k.to_string(), (line_no, v.to_string())).is_some() {
                return Err(PipelineError::Config { line: line_no, msg: format!("duplicate key `{k}`") });
            }
        }
        let e = Entries { values };
        let path = |key: &str| -> Result<Option<PathBuf>, PipelineError> {
            Ok(e.raw(key).filter(|(_, v)| !v.is_empty()).map(|(_, v)| base_dir.join(v)))
        };
        let missing = |key: &str| PipelineError::Config { line: 0, msg: format!("missing required key `{key}`") };

        let default_forest = ForestParams::default();
        let mtry = e.optional_count("mtry", "auto")?;
        let cfg = PipelineConfig {
            train_path: path("train_path")?.ok_or_else(|| missing("train_path"))?,
            test_path: path("test_path")?.ok_or_else(|| missing("test_path"))?,
            format: e.get("format", None)?,
            taxonomy_path: path("taxonomy_path")?,
            subsample_fraction: e.get("subsample_fraction", Some(1.0))?,
            subsample_seed: e.get("subsample_seed", None)?,
            dims1: e.dims("dims1", &default_dims())?,
            dims2: e.dims("dims2", &default_dims())?,
            feature_mode: e.get("feature_mode", Some(FeatureMode::Deepest))?,
            ndae: TrainConfig {
                learning_rate: e.get("learning_rate", Some(0.1))?,
                epochs: e.get("epochs", Some(20))?,
                batch_size: e.get("batch_size", Some(32))?,
                seed: e.get("ndae_seed", None)?,
            },
            classifier: e.get("classifier", Some(ClassifierKind::Forest))?,
            forest: ForestParams {
                n_trees: e.get("n_trees", Some(default_forest.n_trees))?,
                max_depth: e.optional_count("max_depth", "none")?,
                min_samples_split: e.get("min_samples_split", Some(default_forest.min_samples_split))?,
                mtry,
                bootstrap: true,
            },
            forest_seed: e.get("forest_seed", None)?,
            softmax: TrainConfig {
                learning_rate: e.get("softmax_learning_rate", Some(0.5))?,
                epochs: e.get("softmax_epochs", Some(30))?,
                batch_size: e.get("softmax_batch_size", Some(32))?,
                seed: e.get("softmax_seed", None)?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::Config { line: 0, msg });
        if !(self.subsample_fraction > 0.0 && self.subsample_fraction <= 1.0) {
            return bad(format!("subsample_fraction {} outside (0, 1]", self.subsample_fraction));
        }
        for (name, t) in [("ndae", &self.ndae), ("softmax", &self.softmax)] {
            if let Err(err) = t.validate() {
                return bad(format!("{name}: {err}"));
            }
        }
        if self.forest.n_trees == 0 || self.forest.min_samples_split == 0 || self.forest.mtry == Some(0) {
            return bad("n_trees, min_samples_split and mtry must be positive".into());
        }
        Ok(())
    }

    /// Replaces every seed with `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        self.subsample_seed = seed;
        self.ndae.seed = seed;
        self.forest_seed = seed;
        self.softmax.seed = seed;
    }

    /// Normalized rendering of every modeling setting. Paths are excluded;
    /// data identity is tracked by content fingerprints instead.
    pub fn canonical(&self) -> String {
        let dims = |d: &[usize]| d.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "format = {}", self.format);
        let _ = writeln!(s, "subsample_fraction = {}", self.subsample_fraction);
        let _ = writeln!(s, "subsample_seed = {}", self.subsample_seed);
        let _ = writeln!(s, "dims1 = {}", dims(&self.dims1));
        let _ = writeln!(s, "dims2 = {}", dims(&self.dims2));
        let _ = writeln!(s, "feature_mode = {}", self.feature_mode);
        let _ = writeln!(s, "learning_rate = {}", self.ndae.learning_rate);
        let _ = writeln!(s, "epochs = {}", self.ndae.epochs);
        let _ = writeln!(s, "batch_size = {}", self.ndae.batch_size);
        let _ = writeln!(s, "ndae_seed = {}", self.ndae.seed);
        let _ = writeln!(s, "classifier = {}", self.classifier);
        let _ = writeln!(s, "n_trees = {}", self.forest.n_trees);
        let _ = writeln!(s, "max_depth = {}", self.forest.max_depth.map_or("none".into(), |d| d.to_string()));
        let _ = writeln!(s, "min_samples_split = {}", self.forest.min_samples_split);
        let _ = writeln!(s, "mtry = {}", self.forest.mtry.map_or("auto".into(), |m| m.to_string()));
        let _ = writeln!(s, "forest_seed = {}", self.forest_seed);
        let _ = writeln!(s, "softmax_learning_rate = {}", self.softmax.learning_rate);
        let _ = writeln!(s, "softmax_epochs = {}", self.softmax.epochs);
        let _ = writeln!(s, "softmax_batch_size = {}", self.softmax.batch_size);
        let _ = writeln!(s, "softmax_seed = {}", self.softmax.seed);
        s
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "train_path = train.txt\ntest_path = /abs/test.txt\nformat = nslkdd\nsubsample_seed = 1\nndae_seed = 2\nforest_seed = 3\nsoftmax_seed = 4\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = PipelineConfig::parse(MINIMAL, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.train_path, PathBuf::from("/cfg/train.txt"));
        assert_eq!(cfg.test_path, PathBuf::from("/abs/test.txt"));
        assert_eq!(cfg.format, RecordFormat::NslKdd);
        assert_eq!(cfg.dims1, vec![32, 32, 32]);
        assert_eq!(cfg.feature_mode, FeatureMode::Deepest);
        assert_eq!(cfg.forest, ForestParams::default());
        assert_eq!(cfg.classifier, ClassifierKind::Forest);
        assert_eq!((cfg.subsample_seed, cfg.ndae.seed, cfg.forest_seed, cfg.softmax.seed), (1, 2, 3, 4));
    }

    #[test]
    fn comments_overrides_and_errors() {
        let text = format!("# tiny\n{MINIMAL}dims1 = 8, 4\nmax_depth = 6\nmtry = 3\nclassifier = softmax\n");
        let cfg = PipelineConfig::parse(&text, Path::new(".")).unwrap();
        assert_eq!(cfg.dims1, vec![8, 4]);
        assert_eq!(cfg.forest.max_depth, Some(6));
        assert_eq!(cfg.forest.mtry, Some(3));
        assert_eq!(cfg.classifier, ClassifierKind::Softmax);

        assert!(PipelineConfig::parse(&format!("{MINIMAL}bogus = 1\n"), Path::new(".")).is_err());
        assert!(PipelineConfig::parse(&format!("{MINIMAL}dims2 = 4,0\n"), Path::new(".")).is_err());
        assert!(PipelineConfig::parse(&format!("{MINIMAL}epochs = 1\nepochs = 2\n"), Path::new(".")).is_err());
        let no_seed = MINIMAL.replace("forest_seed = 3\n", "");
        match PipelineConfig::parse(&no_seed, Path::new(".")) {
            Err(PipelineError::Config { msg, .. }) => assert!(msg.contains("forest_seed")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn seed_override_changes_hash() {
        let mut cfg = PipelineConfig::parse(MINIMAL, Path::new(".")).unwrap();
        let before = cfg.hash();
        assert_eq!(before, PipelineConfig::parse(MINIMAL, Path::new("/elsewhere")).unwrap().hash());
        cfg.override_seed(99);
        assert_eq!((cfg.subsample_seed, cfg.ndae.seed, cfg.forest_seed, cfg.softmax.seed), (99, 99, 99, 99));
        assert_ne!(cfg.hash(), before);
    }
}
