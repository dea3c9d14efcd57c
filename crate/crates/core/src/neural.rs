//! Minimal dense feed-forward network with exact backpropagation of the
//! mean-squared-error loss and mini-batch SGD.
//!
//! Weights are stored row-major as `out_dim x in_dim`. All arithmetic is in
//! `f64` and every reduction runs in a fixed order, so a given
//! `(config, seed, data)` always yields bit-identical parameters.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum NeuralError {
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },
    #[error("parameter of layer {layer} is no longer finite (learning rate too large?)")]
    NonFiniteParameter { layer: usize },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("no training data")]
    EmptyData,
}

fn check_dim(what: &'static str, expected: usize, actual: usize) -> Result<(), NeuralError> {
    if expected != actual {
        return Err(NeuralError::DimensionMismatch { what, expected, actual });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Sigmoid,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(z),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation value `a = f(z)`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        })
    }
}

impl FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "linear" => Ok(Activation::Linear),
            other => Err(format!("unknown activation `{other}`")),
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self, NeuralError> {
        if in_dim == 0 || out_dim == 0 {
            return Err(NeuralError::InvalidNetwork("layer dimensions must be positive".into()));
        }
        check_dim("weight matrix", in_dim * out_dim, weights.len())?;
        check_dim("bias vector", out_dim, biases.len())?;
        Ok(DenseLayer { in_dim, out_dim, weights, biases, activation })
    }

    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Result<Self, NeuralError> {
        Self::from_parts(in_dim, out_dim, vec![0.0; in_dim * out_dim], vec![0.0; out_dim], activation)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Pre-activation `W x + b` written into `out`.
    pub(crate) fn affine_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, (row, b)) in out.iter_mut().zip(self.weights.chunks_exact(self.in_dim).zip(&self.biases)) {
            *o = row.iter().zip(x).fold(*b, |acc, (w, xi)| acc + w * xi);
        }
    }

    pub(crate) fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        self.affine_into(x, out);
        for v in out.iter_mut() {
            *v = self.activation.apply(*v);
        }
    }

    /// `activation(W x + b)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        check_dim("layer input", self.in_dim, x.len())?;
        let mut out = vec![0.0; self.out_dim];
        self.forward_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn step(&mut self, grad: &LayerGradient, lr: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grad.weights) {
            *w -= lr * g;
        }
        for (b, g) in self.biases.iter_mut().zip(&grad.biases) {
            *b -= lr * g;
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.biases).all(|v| v.is_finite())
    }

    /// Mutable view of one parameter by flat index (weights first, then
    /// biases). Used by gradient checks.
    pub fn parameter_mut(&mut self, i: usize) -> &mut f64 {
        if i < self.weights.len() {
            &mut self.weights[i]
        } else {
            &mut self.biases[i - self.weights.len()]
        }
    }
}

/// Gradient of the loss with respect to one layer's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl LayerGradient {
    fn zeros_like(layer: &DenseLayer) -> Self {
        LayerGradient { weights: vec![0.0; layer.weights.len()], biases: vec![0.0; layer.biases.len()] }
    }

    /// Flat view in the same order as [`DenseLayer::parameter_mut`].
    pub fn get(&self, i: usize) -> f64 {
        if i < self.weights.len() {
            self.weights[i]
        } else {
            self.biases[i - self.weights.len()]
        }
    }

    fn scale(&mut self, s: f64) {
        self.weights.iter_mut().chain(self.biases.iter_mut()).for_each(|v| *v *= s);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients { layers: net.layers.iter().map(LayerGradient::zeros_like).collect() }
    }

    pub fn scale(&mut self, s: f64) {
        self.layers.iter_mut().for_each(|g| g.scale(s));
    }

    pub fn max_abs(&self) -> f64 {
        self.layers.iter().flat_map(|g| g.weights.iter().chain(&g.biases)).fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 0.1, epochs: 10, batch_size: 32, seed: 1 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NeuralError> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(NeuralError::InvalidConfig(format!(
                "learning rate {} must be finite and >= 0",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(NeuralError::InvalidConfig("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

/// Mean over components of the squared difference.
pub fn mse_loss(output: &[f64], target: &[f64]) -> Result<f64, NeuralError> {
    check_dim("loss target", output.len(), target.len())?;
    if output.is_empty() {
        return Err(NeuralError::InvalidNetwork("empty output".into()));
    }
    Ok(squared_error(output, target) / output.len() as f64)
}

fn squared_error(output: &[f64], target: &[f64]) -> f64 {
    output.iter().zip(target).map(|(o, t)| (o - t) * (o - t)).sum()
}

/// Per-example scratch buffers, reused across a training run.
struct Workspace {
    activations: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(net: &Network) -> Self {
        Workspace {
            activations: net.layers.iter().map(|l| vec![0.0; l.out_dim]).collect(),
            deltas: net.layers.iter().map(|l| vec![0.0; l.out_dim]).collect(),
        }
    }
}

impl Network {
    /// Glorot-uniform weights in `[-r, r]`, `r = sqrt(6 / (fan_in + fan_out))`,
    /// and zero biases.
    pub fn init(layer_dims: &[usize], activations: &[Activation], seed: u64) -> Result<Network, NeuralError> {
        if layer_dims.len() < 2 {
            return Err(NeuralError::InvalidNetwork("need at least an input and an output dimension".into()));
        }
        check_dim("activation list", layer_dims.len() - 1, activations.len())?;
        if layer_dims.contains(&0) {
            return Err(NeuralError::InvalidNetwork("layer dimensions must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_dims
            .windows(2)
            .zip(activations)
            .map(|(dims, &act)| {
                let (fan_in, fan_out) = (dims[0], dims[1]);
                let r = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let weights = (0..fan_in * fan_out).map(|_| rng.gen_range(-r..=r)).collect();
                DenseLayer { in_dim: fan_in, out_dim: fan_out, weights, biases: vec![0.0; fan_out], activation: act }
            })
            .collect();
        Ok(Network { layers })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Network, NeuralError> {
        if layers.is_empty() {
            return Err(NeuralError::InvalidNetwork("no layers".into()));
        }
        for pair in layers.windows(2) {
            check_dim("chained layer input", pair[0].out_dim, pair[1].in_dim)?;
        }
        Ok(Network { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn into_layers(self) -> Vec<DenseLayer> {
        self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::parameter_count).sum()
    }

    /// Output of every layer; the last entry is the network output.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, NeuralError> {
        check_dim("network input", self.input_dim(), x.len())?;
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut out = vec![0.0; layer.out_dim];
            layer.forward_into(outs.last().map_or(x, |v| v.as_slice()), &mut out);
            outs.push(out);
        }
        Ok(outs)
    }

    /// Network output only.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        Ok(self.forward(x)?.pop().expect("network has layers"))
    }

    /// Exact gradient of `mse_loss(forward(x), target)` with respect to
    /// every weight and bias.
    pub fn backward(&self, x: &[f64], target: &[f64]) -> Result<Gradients, NeuralError> {
        self.check_pair(x, target)?;
        let mut grads = Gradients::zeros_like(self);
        let mut ws = Workspace::new(self);
        self.accumulate(x, target, &mut ws, &mut grads);
        Ok(grads)
    }

    fn check_pair(&self, x: &[f64], target: &[f64]) -> Result<(), NeuralError> {
        check_dim("network input", self.input_dim(), x.len())?;
        check_dim("loss target", self.output_dim(), target.len())
    }

    /// Adds the gradient for one example into `grads` and returns its loss.
    fn accumulate(&self, x: &[f64], target: &[f64], ws: &mut Workspace, grads: &mut Gradients) -> f64 {
        let n_layers = self.layers.len();
        for (l, layer) in self.layers.iter().enumerate() {
            let (done, rest) = ws.activations.split_at_mut(l);
            let input = if l == 0 { x } else { done[l - 1].as_slice() };
            layer.forward_into(input, &mut rest[0]);
        }

        let output = &ws.activations[n_layers - 1];
        let loss = squared_error(output, target) / output.len() as f64;
        let scale = 2.0 / output.len() as f64;
        let last = &self.layers[n_layers - 1];
        for ((d, &a), &t) in ws.deltas[n_layers - 1].iter_mut().zip(output).zip(target) {
            *d = scale * (a - t) * last.activation.derivative_from_output(a);
        }

        for l in (0..n_layers).rev() {
            let layer = &self.layers[l];
            let input = if l == 0 { x } else { ws.activations[l - 1].as_slice() };
            let g = &mut grads.layers[l];
            let delta = &ws.deltas[l];
            for (o, &d) in delta.iter().enumerate() {
                g.biases[o] += d;
                let row = &mut g.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (gw, &xi) in row.iter_mut().zip(input) {
                    *gw += d * xi;
                }
            }
            if l > 0 {
                let (lower, upper) = ws.deltas.split_at_mut(l);
                let delta = &upper[0];
                let prev = &mut lower[l - 1];
                let act_prev = self.layers[l - 1].activation;
                for (i, p) in prev.iter_mut().enumerate() {
                    let mut sum = 0.0;
                    for (o, &d) in delta.iter().enumerate() {
                        sum += layer.weights[o * layer.in_dim + i] * d;
                    }
                    *p = sum * act_prev.derivative_from_output(ws.activations[l - 1][i]);
                }
            }
        }
        loss
    }

    /// Gradient-descent update with an already averaged gradient.
    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) -> Result<(), NeuralError> {
        for (l, (layer, g)) in self.layers.iter_mut().zip(&grads.layers).enumerate() {
            layer.step(g, learning_rate);
            if !layer.is_finite() {
                return Err(NeuralError::NonFiniteParameter { layer: l });
            }
        }
        Ok(())
    }

    /// One pass over the data in an order shuffled by `rng`. Each mini-batch
    /// applies `theta -= lr * mean_gradient`. Returns the mean per-example
    /// loss, each loss taken before its batch's update.
    pub fn sgd_epoch(
        &mut self,
        inputs: &Matrix,
        targets: &Matrix,
        cfg: &TrainConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<f64, NeuralError> {
        cfg.validate()?;
        if inputs.is_empty() {
            return Err(NeuralError::EmptyData);
        }
        check_dim("target rows", inputs.rows(), targets.rows())?;
        check_dim("network input", self.input_dim(), inputs.cols())?;
        check_dim("loss target", self.output_dim(), targets.cols())?;

        let mut order: Vec<usize> = (0..inputs.rows()).collect();
        order.shuffle(rng);

        let mut ws = Workspace::new(self);
        let mut grads = Gradients::zeros_like(self);
        let mut total_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            for g in &mut grads.layers {
                g.weights.fill(0.0);
                g.biases.fill(0.0);
            }
            for &i in batch {
                total_loss += self.accumulate(inputs.row(i), targets.row(i), &mut ws, &mut grads);
            }
            grads.scale(1.0 / batch.len() as f64);
            self.apply_gradients(&grads, cfg.learning_rate)?;
        }
        Ok(total_loss / inputs.rows() as f64)
    }

    /// Runs `cfg.epochs` epochs with a shuffle stream seeded from `cfg.seed`
    /// and returns the per-epoch mean loss.
    pub fn train(&mut self, inputs: &Matrix, targets: &Matrix, cfg: &TrainConfig) -> Result<Vec<f64>, NeuralError> {
        cfg.validate()?;
        let mut rng = shuffle_rng(cfg.seed);
        (0..cfg.epochs).map(|_| self.sgd_epoch(inputs, targets, cfg, &mut rng)).collect()
    }

    /// Mean loss over all rows without updating anything.
    pub fn mean_loss(&self, inputs: &Matrix, targets: &Matrix) -> Result<f64, NeuralError> {
        if inputs.is_empty() {
            return Err(NeuralError::EmptyData);
        }
        check_dim("target rows", inputs.rows(), targets.rows())?;
        let mut total = 0.0;
        for (x, t) in inputs.iter_rows().zip(targets.iter_rows()) {
            total += mse_loss(&self.predict(x)?, t)?;
        }
        Ok(total / inputs.rows() as f64)
    }
}

/// Shuffle stream for training, kept separate from the initialization stream.
pub(crate) fn shuffle_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_forward(net: &Network, x: &[f64]) -> Vec<f64> {
        let mut h = x.to_vec();
        for layer in net.layers() {
            let mut next = Vec::new();
            for o in 0..layer.out_dim() {
                let mut z = layer.biases()[o];
                for (w, hi) in layer.weights()[o * layer.in_dim()..(o + 1) * layer.in_dim()].iter().zip(&h) {
                    z += w * hi;
                }
                next.push(match layer.activation() {
                    Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                    Activation::Linear => z,
                });
            }
            h = next;
        }
        h
    }

    #[test]
    fn init_shapes_and_determinism() {
        let a = Network::init(&[4, 2], &[Activation::Sigmoid], 7).unwrap();
        let b = Network::init(&[4, 2], &[Activation::Sigmoid], 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.layers()[0].weights().len(), 8);
        assert_eq!(a.layers()[0].biases(), &[0.0, 0.0]);
        let r = (6.0f64 / 6.0).sqrt();
        assert!(a.layers()[0].weights().iter().all(|w| w.abs() <= r));

        let deep = Network::init(&[122, 32, 32], &[Activation::Sigmoid; 2], 1).unwrap();
        assert_eq!(deep.layers().len(), 2);
        assert_eq!((deep.layers()[0].out_dim(), deep.layers()[0].in_dim()), (32, 122));
        assert_eq!((deep.layers()[1].out_dim(), deep.layers()[1].in_dim()), (32, 32));

        assert!(matches!(
            Network::init(&[4, 2, 3], &[Activation::Sigmoid], 1),
            Err(NeuralError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_network_outputs_half() {
        let net = Network::from_layers(vec![DenseLayer::zeros(3, 4, Activation::Sigmoid).unwrap()]).unwrap();
        assert_eq!(net.predict(&[0.3, -2.0, 9.0]).unwrap(), vec![0.5; 4]);
    }

    #[test]
    fn identity_linear_layer() {
        let mut w = vec![0.0; 9];
        for i in 0..3 {
            w[i * 3 + i] = 1.0;
        }
        let layer = DenseLayer::from_parts(3, 3, w, vec![0.0; 3], Activation::Linear).unwrap();
        let net = Network::from_layers(vec![layer]).unwrap();
        assert_eq!(net.predict(&[0.25, -1.5, 3.0]).unwrap(), vec![0.25, -1.5, 3.0]);
    }

    #[test]
    fn forward_matches_straight_line_oracle() {
        let net = Network::init(&[3, 4, 2], &[Activation::Sigmoid, Activation::Linear], 11).unwrap();
        let x = [0.2, -0.7, 1.3];
        let got = net.predict(&x).unwrap();
        let want = brute_force_forward(&net, &x);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn mse_values() {
        assert_eq!(mse_loss(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);
        let a = [0.1, 0.9, -0.4, 2.0, 0.33];
        let b = [0.0, 1.0, 0.5, 1.5, -0.2];
        let mut sum = 0.0;
        for i in 0..a.len() {
            sum += (a[i] - b[i]) * (a[i] - b[i]);
        }
        assert!((mse_loss(&a, &b).unwrap() - sum / 5.0).abs() < 1e-15);
        assert!(mse_loss(&a, &b[..4]).is_err());
    }

    #[test]
    fn zero_gradient_at_target() {
        let net = Network::init(&[3, 4, 2], &[Activation::Sigmoid, Activation::Linear], 3).unwrap();
        let x = [0.1, 0.2, 0.3];
        let target = net.predict(&x).unwrap();
        assert_eq!(net.backward(&x, &target).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn shape_errors_before_arithmetic() {
        let net = Network::init(&[3, 2], &[Activation::Sigmoid], 3).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(NeuralError::DimensionMismatch { expected: 3, actual: 1, .. })));
        assert!(net.backward(&[1.0, 2.0, 3.0], &[0.0]).is_err());
        let layers = vec![
            DenseLayer::zeros(3, 2, Activation::Sigmoid).unwrap(),
            DenseLayer::zeros(3, 2, Activation::Sigmoid).unwrap(),
        ];
        assert!(Network::from_layers(layers).is_err());
    }

    #[test]
    fn duplicated_pair_batch_gives_single_gradient() {
        let net = Network::init(&[3, 4, 3], &[Activation::Sigmoid, Activation::Linear], 5).unwrap();
        let x = [0.5, 0.1, 0.9];
        let t = [0.0, 1.0, 0.5];
        let single = net.backward(&x, &t).unwrap();

        let inputs = Matrix::from_rows(3, [x, x]).unwrap();
        let targets = Matrix::from_rows(3, [t, t]).unwrap();
        let mut stepped = net.clone();
        let cfg = TrainConfig { learning_rate: 1.0, epochs: 1, batch_size: 2, seed: 0 };
        stepped.sgd_epoch(&inputs, &targets, &cfg, &mut shuffle_rng(0)).unwrap();
        for (l, layer) in stepped.layers().iter().enumerate() {
            for (i, w) in layer.weights().iter().enumerate() {
                let expected = net.layers()[l].weights()[i] - single.layers[l].weights[i];
                assert!((w - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_learning_rate_and_zero_epochs_leave_network_unchanged() {
        let net = Network::init(&[2, 3, 2], &[Activation::Sigmoid, Activation::Linear], 9).unwrap();
        let data = Matrix::from_rows(2, [[0.1, 0.2], [0.3, 0.4]]).unwrap();
        let mut a = net.clone();
        let loss = a
            .sgd_epoch(
                &data,
                &data,
                &TrainConfig { learning_rate: 0.0, epochs: 1, batch_size: 1, seed: 1 },
                &mut shuffle_rng(1),
            )
            .unwrap();
        assert_eq!(a, net);
        assert!(loss > 0.0);
        let mut b = net.clone();
        let curve = b.train(&data, &data, &TrainConfig { epochs: 0, ..Default::default() }).unwrap();
        assert!(curve.is_empty());
        assert_eq!(b, net);
    }

    #[test]
    fn memorizes_a_single_point() {
        let v = [0.2, 0.9, 0.4, 0.0, 1.0];
        let data = Matrix::from_rows(5, std::iter::repeat_n(v, 32)).unwrap();
        let mut net = Network::init(&[5, 8, 5], &[Activation::Sigmoid, Activation::Linear], 21).unwrap();
        let cfg = TrainConfig { learning_rate: 0.1, epochs: 200, batch_size: 4, seed: 2 };
        net.train(&data, &data, &cfg).unwrap();
        assert!(net.mean_loss(&data, &data).unwrap() < 1e-3);
    }

    #[test]
    fn divergence_is_reported() {
        let data = Matrix::from_rows(2, [[1.0, 1.0], [0.0, 0.5]]).unwrap();
        let targets = Matrix::from_rows(1, [[1e200], [-1e200]]).unwrap();
        let mut net = Network::init(&[2, 1], &[Activation::Linear], 1).unwrap();
        let cfg = TrainConfig { learning_rate: 1e200, epochs: 5, batch_size: 1, seed: 1 };
        assert!(matches!(net.train(&data, &targets, &cfg), Err(NeuralError::NonFiniteParameter { layer: 0 })));
    }
}
