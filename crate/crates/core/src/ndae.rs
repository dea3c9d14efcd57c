//! Non-symmetric deep auto-encoders (NDAEs), the two-stage stacked feature
//! extractor, and a soft-max classification head.
//!
//! An NDAE is `k` sigmoid encoder layers followed by a single linear layer
//! that maps the deepest code straight back to the input. There is no
//! mirrored decoder stack; the reconstruction layer exists only to give the
//! encoder a training signal and is ignored when extracting features.
//!
//! Training is unsupervised: none of the NDAE entry points take labels.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::AttackClass;
use crate::matrix::Matrix;
use crate::neural::{shuffle_rng, Activation, DenseLayer, LayerGradient, Network, NeuralError, TrainConfig};

/// Which representation of the stack feeds the classifier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FeatureMode {
    /// Deepest code of the second NDAE.
    #[default]
    Deepest,
    /// Deepest code of the first NDAE followed by that of the second.
    Concat,
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Deepest => "deepest",
            FeatureMode::Concat => "concat",
        })
    }
}

impl FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deepest" => Ok(FeatureMode::Deepest),
            "concat" => Ok(FeatureMode::Concat),
            other => Err(format!("unknown feature mode `{other}` (expected deepest or concat)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NdaeModel {
    encoder: Network,
    reconstructor: DenseLayer,
}

/// Result of [`train_ndae`].
#[derive(Clone, Debug)]
pub struct NdaeTraining {
    pub model: NdaeModel,
    /// Mean reconstruction loss of each epoch.
    pub loss_curve: Vec<f64>,
    /// Reconstruction MSE over the data at initialization.
    pub initial_mse: f64,
    /// Reconstruction MSE over the data after the last epoch.
    pub final_mse: f64,
}

impl NdaeModel {
    /// Randomly initialized model; see [`Network::init`].
    pub fn init(input_dim: usize, hidden_dims: &[usize], seed: u64) -> Result<NdaeModel, NeuralError> {
        if hidden_dims.is_empty() {
            return Err(NeuralError::InvalidNetwork("an NDAE needs at least one hidden layer".into()));
        }
        let mut dims = Vec::with_capacity(hidden_dims.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(hidden_dims);
        dims.push(input_dim);
        let mut acts = vec![Activation::Sigmoid; hidden_dims.len()];
        acts.push(Activation::Linear);
        Self::split(Network::init(&dims, &acts, seed)?)
    }

    pub fn from_parts(encoder: Network, reconstructor: DenseLayer) -> Result<NdaeModel, NeuralError> {
        if reconstructor.in_dim() != encoder.output_dim() || reconstructor.out_dim() != encoder.input_dim() {
            return Err(NeuralError::InvalidNetwork(format!(
                "reconstructor {}->{} does not close encoder {}->{}",
                reconstructor.in_dim(),
                reconstructor.out_dim(),
                encoder.input_dim(),
                encoder.output_dim()
            )));
        }
        if encoder.layers().iter().any(|l| l.activation() != Activation::Sigmoid)
            || reconstructor.activation() != Activation::Linear
        {
            return Err(NeuralError::InvalidNetwork("encoder layers must be sigmoid, reconstructor linear".into()));
        }
        Ok(NdaeModel { encoder, reconstructor })
    }

    fn split(full: Network) -> Result<NdaeModel, NeuralError> {
        let mut layers = full.into_layers();
        let reconstructor = layers.pop().expect("at least two layers");
        Self::from_parts(Network::from_layers(layers)?, reconstructor)
    }

    fn joined(&self) -> Network {
        let mut layers = self.encoder.layers().to_vec();
        layers.push(self.reconstructor.clone());
        Network::from_layers(layers).expect("model dimensions are consistent")
    }

    pub fn encoder(&self) -> &Network {
        &self.encoder
    }

    pub fn reconstructor(&self) -> &DenseLayer {
        &self.reconstructor
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    pub fn hidden_dims(&self) -> Vec<usize> {
        self.encoder.layers().iter().map(DenseLayer::out_dim).collect()
    }

    pub fn code_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    pub fn parameter_count(&self) -> usize {
        self.encoder.parameter_count() + self.reconstructor.parameter_count()
    }

    /// Deepest hidden activations; the reconstructor is not applied.
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.encoder.predict(x)
    }

    /// Encodes every row in parallel, keeping row order.
    pub fn encode_matrix(&self, data: &Matrix) -> Result<Matrix, NeuralError> {
        if data.cols() != self.input_dim() {
            return Err(NeuralError::DimensionMismatch {
                what: "network input",
                expected: self.input_dim(),
                actual: data.cols(),
            });
        }
        let rows: Vec<Vec<f64>> = (0..data.rows())
            .into_par_iter()
            .map(|i| self.encoder.predict(data.row(i)).expect("dimension checked"))
            .collect();
        Ok(Matrix::from_rows(self.code_dim(), rows).expect("fixed code width"))
    }

    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.reconstructor.forward(&self.encode(x)?)
    }

    pub fn reconstruction_mse(&self, data: &Matrix) -> Result<f64, NeuralError> {
        self.joined().mean_loss(data, data)
    }
}

/// Parameter count of a conventional auto-encoder with the same encoder
/// whose decoder mirrors it layer for layer.
pub fn mirrored_parameter_count(input_dim: usize, hidden_dims: &[usize]) -> usize {
    let mut dims = vec![input_dim];
    dims.extend_from_slice(hidden_dims);
    dims.extend(hidden_dims.iter().rev().skip(1));
    dims.push(input_dim);
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Trains encoder and reconstructor jointly to reproduce `data`.
pub fn train_ndae(data: &Matrix, hidden_dims: &[usize], cfg: &TrainConfig) -> Result<NdaeTraining, NeuralError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(NeuralError::EmptyData);
    }
    let mut net = NdaeModel::init(data.cols(), hidden_dims, cfg.seed)?.joined();
    let initial_mse = net.mean_loss(data, data)?;
    let loss_curve = net.train(data, data, cfg)?;
    let final_mse = net.mean_loss(data, data)?;
    Ok(NdaeTraining { model: NdaeModel::split(net)?, loss_curve, initial_mse, final_mse })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StackedModel {
    first: NdaeModel,
    second: NdaeModel,
    feature_mode: FeatureMode,
}

#[derive(Clone, Debug)]
pub struct StackedTraining {
    pub model: StackedModel,
    pub first: NdaeTraining,
    pub second: NdaeTraining,
}

impl StackedModel {
    pub fn new(first: NdaeModel, second: NdaeModel, feature_mode: FeatureMode) -> Result<StackedModel, NeuralError> {
        if second.input_dim() != first.code_dim() {
            return Err(NeuralError::DimensionMismatch {
                what: "second NDAE input",
                expected: first.code_dim(),
                actual: second.input_dim(),
            });
        }
        Ok(StackedModel { first, second, feature_mode })
    }

    pub fn first(&self) -> &NdaeModel {
        &self.first
    }

    pub fn second(&self) -> &NdaeModel {
        &self.second
    }

    pub fn feature_mode(&self) -> FeatureMode {
        self.feature_mode
    }

    pub fn input_dim(&self) -> usize {
        self.first.input_dim()
    }

    pub fn feature_dim(&self) -> usize {
        match self.feature_mode {
            FeatureMode::Deepest => self.second.code_dim(),
            FeatureMode::Concat => self.first.code_dim() + self.second.code_dim(),
        }
    }

    /// Classifier features for one connection record.
    pub fn extract(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        let code1 = self.first.encode(x)?;
        let code2 = self.second.encode(&code1)?;
        Ok(match self.feature_mode {
            FeatureMode::Deepest => code2,
            FeatureMode::Concat => {
                let mut out = code1;
                out.extend(code2);
                out
            }
        })
    }

    pub fn extract_matrix(&self, data: &Matrix) -> Result<Matrix, NeuralError> {
        if data.cols() != self.input_dim() {
            return Err(NeuralError::DimensionMismatch {
                what: "network input",
                expected: self.input_dim(),
                actual: data.cols(),
            });
        }
        let rows: Vec<Vec<f64>> =
            (0..data.rows()).into_par_iter().map(|i| self.extract(data.row(i)).expect("dimension checked")).collect();
        Ok(Matrix::from_rows(self.feature_dim(), rows).expect("fixed feature width"))
    }
}

/// Trains the first NDAE on `data`, encodes all of `data` with it, and
/// trains the second NDAE on those codes. The second stage uses
/// `cfg.seed + 1`.
pub fn train_stacked(
    data: &Matrix,
    dims1: &[usize],
    dims2: &[usize],
    cfg: &TrainConfig,
    feature_mode: FeatureMode,
) -> Result<StackedTraining, NeuralError> {
    let first = train_ndae(data, dims1, cfg)?;
    let codes = first.model.encode_matrix(data)?;
    let cfg2 = TrainConfig { seed: cfg.seed.wrapping_add(1), ..cfg.clone() };
    let second = train_ndae(&codes, dims2, &cfg2)?;
    let model = StackedModel::new(first.model.clone(), second.model.clone(), feature_mode)?;
    Ok(StackedTraining { model, first, second })
}

/// Linear layer with five outputs followed by soft-max.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftmaxHead {
    layer: DenseLayer,
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

impl SoftmaxHead {
    /// All-zero head; predicts the uniform distribution.
    pub fn zeros(input_dim: usize) -> Result<SoftmaxHead, NeuralError> {
        Ok(SoftmaxHead { layer: DenseLayer::zeros(input_dim, AttackClass::COUNT, Activation::Linear)? })
    }

    pub fn from_layer(layer: DenseLayer) -> Result<SoftmaxHead, NeuralError> {
        if layer.out_dim() != AttackClass::COUNT || layer.activation() != Activation::Linear {
            return Err(NeuralError::InvalidNetwork("soft-max head must be a linear layer with 5 outputs".into()));
        }
        Ok(SoftmaxHead { layer })
    }

    pub fn layer(&self) -> &DenseLayer {
        &self.layer
    }

    pub fn input_dim(&self) -> usize {
        self.layer.in_dim()
    }

    pub fn probabilities(&self, x: &[f64]) -> Result<[f64; 5], NeuralError> {
        let p = softmax(&self.layer.forward(x)?);
        Ok([p[0], p[1], p[2], p[3], p[4]])
    }

    /// Most probable class; ties go to the earliest class.
    pub fn predict(&self, x: &[f64]) -> Result<AttackClass, NeuralError> {
        let p = self.probabilities(x)?;
        let mut best = 0;
        for i in 1..AttackClass::COUNT {
            if p[i] > p[best] {
                best = i;
            }
        }
        Ok(AttackClass::ALL[best])
    }
}

/// Mini-batch SGD on the mean cross-entropy, starting from an all-zero head.
/// Returns the head and the per-epoch mean loss.
pub fn train_softmax_baseline(
    features: &Matrix,
    labels: &[AttackClass],
    cfg: &TrainConfig,
) -> Result<(SoftmaxHead, Vec<f64>), NeuralError> {
    cfg.validate()?;
    if features.is_empty() {
        return Err(NeuralError::EmptyData);
    }
    if features.rows() != labels.len() {
        return Err(NeuralError::DimensionMismatch {
            what: "label count",
            expected: features.rows(),
            actual: labels.len(),
        });
    }
    let dim = features.cols();
    let mut head = SoftmaxHead::zeros(dim)?;
    let mut rng = shuffle_rng(cfg.seed);
    let mut order: Vec<usize> = (0..features.rows()).collect();
    let mut grad =
        LayerGradient { weights: vec![0.0; dim * AttackClass::COUNT], biases: vec![0.0; AttackClass::COUNT] };
    let mut curve = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.weights.fill(0.0);
            grad.biases.fill(0.0);
            for &i in batch {
                let x = features.row(i);
                let p = head.probabilities(x)?;
                let truth = labels[i].index();
                total -= p[truth].max(f64::MIN_POSITIVE).ln();
                for (c, &pc) in p.iter().enumerate() {
                    let d = pc - if c == truth { 1.0 } else { 0.0 };
                    grad.biases[c] += d;
                    for (g, xi) in grad.weights[c * dim..(c + 1) * dim].iter_mut().zip(x) {
                        *g += d * xi;
                    }
                }
            }
            let inv = 1.0 / batch.len() as f64;
            grad.weights.iter_mut().chain(grad.biases.iter_mut()).for_each(|g| *g *= inv);
            head.layer.step(&grad, cfg.learning_rate);
            if !head.layer.is_finite() {
                return Err(NeuralError::NonFiniteParameter { layer: 0 });
            }
        }
        curve.push(total / features.rows() as f64);
    }
    Ok((head, curve))
}
