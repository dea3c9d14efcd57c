mod common;

use ndae_ids::dataset::{encode_records, fit_encoding, synthetic};
use ndae_ids::forest::{best_split, bootstrap_sample, grow_tree, train_forest, tree_rng, TreeParams};
use ndae_ids::metrics::{binarize, compute_metrics, confusion, EvaluationReport};
use ndae_ids::ndae::train_ndae;
use ndae_ids::{AttackClass, ForestParams, Matrix, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn backprop_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let net = common::random_network(&mut rng);
        let x: Vec<f64> = (0..net.input_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t: Vec<f64> = (0..net.output_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let err = common::fd_max_relative_error(&net, &x, &t);
        assert!(err < 1e-4, "relative error {err}");
    }
}

#[test]
fn best_split_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (x, y, idx) = common::random_split_instance(&mut rng);
        let all: Vec<usize> = (0..x.cols()).collect();
        let got = best_split(&x, &y, &idx, &all);
        let want = common::exhaustive_split(&x, &y, &idx, &all);
        match (got, want) {
            (None, None) => {}
            (Some(g), Some(w)) => {
                assert_eq!((g.feature, g.threshold), (w.feature, w.threshold));
                assert!((g.impurity - w.impurity).abs() < 1e-12);
            }
            (g, w) => panic!("implementation {g:?} vs oracle {w:?}"),
        }
    }
}

#[test]
fn metrics_match_brute_force_tally() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.gen_range(1..60);
        // skewed draws leave some classes absent so undefined cells occur
        let k = rng.gen_range(1..=5);
        let draw = |rng: &mut ChaCha8Rng| AttackClass::from_index(rng.gen_range(0..k)).unwrap();
        let truth: Vec<AttackClass> = (0..n).map(|_| draw(&mut rng)).collect();
        let pred: Vec<AttackClass> = (0..n).map(|_| draw(&mut rng)).collect();
        let cm = confusion(&pred, &truth).unwrap();
        let report = EvaluationReport::build(&cm, &[0; 5]);
        let mut summed = [0usize; 4];
        for c in AttackClass::ALL {
            let (counts, want) = common::brute_metrics(&pred, &truth, c);
            let b = binarize(&cm, c);
            assert_eq!([b.tp, b.fp, b.tn, b.fn_], counts);
            let got = compute_metrics(&b).columns();
            for i in 0..5 {
                assert!(common::close(got[i], want[i], 1e-12), "{c} column {i}: {:?} vs {:?}", got[i], want[i]);
            }
            for i in 0..4 {
                summed[i] += counts[i];
            }
        }
        let total_want = common::brute_from_counts(summed[0], summed[1], summed[2], summed[3]);
        let total_got = report.total().metrics.columns();
        for i in 0..5 {
            assert!(common::close(total_got[i], total_want[i], 1e-12));
        }
        let hits = pred.iter().zip(&truth).filter(|(p, t)| p == t).count();
        assert_eq!(report.overall_accuracy(), Some(hits as f64 / n as f64));
    }
}

#[test]
fn bootstrap_covers_about_63_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 1000;
    let mut fractions = 0.0;
    for _ in 0..1000 {
        let mut seen = vec![false; n];
        for i in bootstrap_sample(n, &mut rng) {
            seen[i] = true;
        }
        fractions += seen.iter().filter(|&&s| s).count() as f64 / n as f64;
    }
    let mean = fractions / 1000.0;
    assert!((mean - 0.632).abs() < 0.02, "mean unique fraction {mean}");
}

#[test]
fn each_forest_tree_matches_independent_regrowth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 80;
    let x = Matrix::from_vec(n, 6, (0..n * 6).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
    let y: Vec<AttackClass> = (0..n).map(|i| AttackClass::from_index((x.get(i, 0) * 5.0) as usize).unwrap()).collect();
    let params = ForestParams { n_trees: 12, max_depth: Some(6), ..ForestParams::default() };
    let forest = train_forest(&x, &y, &params, 77).unwrap();
    let tree_params = TreeParams { max_depth: Some(6), min_samples_split: 2, mtry: 2 };
    assert_eq!(forest.mtry(), 2);
    for (i, tree) in forest.trees().iter().enumerate() {
        let mut r = tree_rng(77, i);
        let sample = bootstrap_sample(n, &mut r);
        assert_eq!(&grow_tree(&x, &y, &sample, &tree_params, &mut r), tree, "tree {i}");
    }
}

#[test]
fn ndae_loss_windows_do_not_rise_after_burn_in() {
    const BURN_IN: usize = 10;
    const WINDOW: usize = 5;
    let records = synthetic::generate([120, 90, 40, 20, 6], 8);
    let data = encode_records(&records, &fit_encoding(&records).unwrap()).unwrap();
    let cfg = TrainConfig { learning_rate: 0.1, epochs: 30, batch_size: 16, seed: 8 };
    let run = train_ndae(&data, &[16, 8], &cfg).unwrap();
    let means: Vec<f64> =
        run.loss_curve[BURN_IN..].chunks(WINDOW).map(|w| w.iter().sum::<f64>() / w.len() as f64).collect();
    for pair in means.windows(2) {
        assert!(pair[1] <= pair[0] * 1.10, "window means {means:?}");
    }
    assert!(run.final_mse < run.initial_mse);
}
