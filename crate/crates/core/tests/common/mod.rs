//! Independent oracles and fixtures shared by the integration tests and the
//! acceptance runner.
#![allow(dead_code)]

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use ndae_ids::dataset::synthetic;
use ndae_ids::forest::Split;
use ndae_ids::neural::{mse_loss, Activation, Network};
use ndae_ids::pipeline::PipelineConfig;
use ndae_ids::{AttackClass, Matrix, RecordFormat};
use rand::Rng;

pub const FD_STEP: f64 = 1e-5;
/// Denominator floor for relative gradient error, so parameters whose true
/// gradient is zero are judged on absolute error.
pub const FD_FLOOR: f64 = 1e-7;

/// Random sigmoid/linear network with 1 to 3 layers of 1 to 10 units.
pub fn random_network<R: Rng>(rng: &mut R) -> Network {
    let depth = rng.gen_range(1..=3);
    let dims: Vec<usize> = (0..=depth).map(|_| rng.gen_range(1..=10)).collect();
    let acts: Vec<Activation> =
        (0..depth).map(|_| if rng.gen_bool(0.7) { Activation::Sigmoid } else { Activation::Linear }).collect();
    let mut net = Network::init(&dims, &acts, rng.gen()).unwrap();
    // move off the zero-bias initialization so bias gradients are exercised
    for layer in net.layers_mut() {
        for p in 0..layer.parameter_count() {
            *layer.parameter_mut(p) += rng.gen_range(-0.5..0.5);
        }
    }
    net
}

/// Largest relative error between backprop and central differences over
/// every parameter of `net`.
pub fn fd_max_relative_error(net: &Network, x: &[f64], target: &[f64]) -> f64 {
    let grads = net.backward(x, target).unwrap();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for li in 0..net.layers().len() {
        for p in 0..net.layers()[li].parameter_count() {
            let original = net.layers()[li].clone();
            *probe.layers_mut()[li].parameter_mut(p) += FD_STEP;
            let up = mse_loss(&probe.predict(x).unwrap(), target).unwrap();
            probe.layers_mut()[li] = original.clone();
            *probe.layers_mut()[li].parameter_mut(p) -= FD_STEP;
            let down = mse_loss(&probe.predict(x).unwrap(), target).unwrap();
            probe.layers_mut()[li] = original;
            let numeric = (up - down) / (2.0 * FD_STEP);
            let analytic = grads.layers[li].get(p);
            let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(FD_FLOOR);
            worst = worst.max(rel);
        }
    }
    worst
}

/// Up to 30 examples over up to 4 features on a coarse value grid, so
/// duplicate values and impurity ties are common.
pub fn random_split_instance<R: Rng>(rng: &mut R) -> (Matrix, Vec<AttackClass>, Vec<usize>) {
    let n = rng.gen_range(1..=30);
    let d = rng.gen_range(1..=4);
    let grid = rng.gen_range(2..=6);
    let data: Vec<f64> = (0..n * d).map(|_| rng.gen_range(0..grid) as f64 / grid as f64).collect();
    let classes = rng.gen_range(1..=5);
    let y = (0..n).map(|_| AttackClass::from_index(rng.gen_range(0..classes)).unwrap()).collect();
    (Matrix::from_vec(n, d, data).unwrap(), y, (0..n).collect())
}

/// Exact rational `a / b` with `b > 0`.
#[derive(Clone, Copy, Debug)]
struct Frac(i128, i128);

impl Frac {
    fn less(self, o: Frac) -> bool {
        self.0 * o.1 < o.0 * self.1
    }
    fn eq(self, o: Frac) -> bool {
        self.0 * o.1 == o.0 * self.1
    }
}

fn gini_exact(counts: &[i128; 5]) -> Frac {
    let n: i128 = counts.iter().sum();
    if n == 0 {
        return Frac(0, 1);
    }
    Frac(n * n - counts.iter().map(|c| c * c).sum::<i128>(), n * n)
}

/// Brute-force best split: tries every midpoint threshold by partitioning
/// the examples afresh, scores with exact rational Gini and applies the
/// lower-feature, lower-threshold tie rule.
pub fn exhaustive_split(x: &Matrix, y: &[AttackClass], idx: &[usize], subset: &[usize]) -> Option<Split> {
    let tally = |members: &mut dyn Iterator<Item = usize>| {
        let mut c = [0i128; 5];
        for i in members {
            c[y[i].index()] += 1;
        }
        c
    };
    let n = idx.len() as i128;
    let parent = gini_exact(&tally(&mut idx.iter().copied()));
    let mut best: Option<(usize, f64, Frac)> = None;
    let mut feats = subset.to_vec();
    feats.sort_unstable();
    for &f in &feats {
        let mut values: Vec<f64> = idx.iter().map(|&i| x.get(i, f)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = ndae_ids::forest::midpoint(w[0], w[1]);
            let l = tally(&mut idx.iter().copied().filter(|&i| x.get(i, f) <= t));
            let r = tally(&mut idx.iter().copied().filter(|&i| x.get(i, f) > t));
            let (gl, gr) = (gini_exact(&l), gini_exact(&r));
            let (nl, nr): (i128, i128) = (l.iter().sum(), r.iter().sum());
            // (nl*gl + nr*gr) / n with gl, gr as fractions
            let weighted = Frac(nl * gl.0 * gr.1 + nr * gr.0 * gl.1, n * gl.1 * gr.1);
            if !weighted.less(parent) {
                continue;
            }
            let better = match best {
                None => true,
                Some((bf, bt, bw)) => weighted.less(bw) || (weighted.eq(bw) && (f, t) < (bf, bt)),
            };
            if better {
                best = Some((f, t, weighted));
            }
        }
    }
    best.map(|(feature, threshold, w)| Split { feature, threshold, impurity: w.0 as f64 / w.1 as f64 })
}

/// Per-class metrics tallied straight from the prediction and label
/// vectors, in column order accuracy, precision, recall, F-score, false
/// alarm.
pub fn brute_metrics(
    pred: &[AttackClass],
    truth: &[AttackClass],
    class: AttackClass,
) -> ([usize; 4], [Option<f64>; 5]) {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p == class, t == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    ([tp, fp, tn, fn_], brute_from_counts(tp, fp, tn, fn_))
}

pub fn brute_from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> [Option<f64>; 5] {
    let div = |a: usize, b: usize| if b == 0 { None } else { Some(a as f64 / b as f64) };
    let accuracy = div(tp + tn, tp + tn + fp + fn_);
    let precision = div(tp, tp + fp);
    let recall = div(tp, tp + fn_);
    let f = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    [accuracy, precision, recall, f, div(fp, fp + tn)]
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => (a - b).abs() <= tol,
        _ => false,
    }
}

/// Writes synthetic train/test files into `dir` and returns a config
/// pointing at them.
pub fn synthetic_setup(dir: &Path, train: [usize; 5], test: [usize; 5], extra: &str) -> PipelineConfig {
    for (name, counts, seed) in [("train.txt", train, 101), ("test.txt", test, 202)] {
        let records = synthetic::generate(counts, seed);
        let w = BufWriter::new(File::create(dir.join(name)).unwrap());
        synthetic::write_records(&records, RecordFormat::NslKdd, w).unwrap();
    }
    let text = format!(
        "train_path = train.txt\n\
         test_path = test.txt\n\
         format = nslkdd\n\
         subsample_seed = 3\n\
         dims1 = 8\n\
         dims2 = 8\n\
         epochs = 3\n\
         ndae_seed = 3\n\
         n_trees = 5\n\
         forest_seed = 3\n\
         softmax_seed = 3\n\
         {extra}"
    );
    std::fs::write(dir.join("pipeline.conf"), &text).unwrap();
    PipelineConfig::load(&dir.join("pipeline.conf")).unwrap()
}
