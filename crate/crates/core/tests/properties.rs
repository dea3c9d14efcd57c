use ndae_ids::dataset::{encode_records, fit_encoding, synthetic, ColumnEncoding};
use ndae_ids::metrics::{binarize, confusion};
use ndae_ids::ndae::softmax;
use ndae_ids::AttackClass;
use proptest::prelude::*;

fn class() -> impl Strategy<Value = AttackClass> {
    (0usize..5).prop_map(|i| AttackClass::from_index(i).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn softmax_is_a_probability_vector(logits in prop::collection::vec(-50.0f64..50.0, 5)) {
        let p = softmax(&logits);
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_vs_rest_counts_partition_the_test_set(
        pairs in prop::collection::vec((class(), class()), 1..200)
    ) {
        let (pred, truth): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let cm = confusion(&pred, &truth).unwrap();
        let mut tp_sum = 0;
        for c in AttackClass::ALL {
            let b = binarize(&cm, c);
            prop_assert_eq!(b.total(), pred.len());
            tp_sum += b.tp;
        }
        prop_assert_eq!(tp_sum, cm.trace());
    }

    #[test]
    fn fitted_encoding_is_unit_range_with_exact_one_hot_groups(
        counts in prop::array::uniform5(0usize..15),
        seed in any::<u64>(),
    ) {
        prop_assume!(counts.iter().sum::<usize>() > 0);
        let records = synthetic::generate(counts, seed);
        let map = fit_encoding(&records).unwrap();
        let m = encode_records(&records, &map).unwrap();
        prop_assert!(m.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        for row in m.iter_rows() {
            for (col, enc) in map.columns().iter().enumerate() {
                if let ColumnEncoding::Categorical { .. } = enc {
                    let start = map.offset(col);
                    let group = &row[start..start + enc.width()];
                    prop_assert_eq!(group.iter().sum::<f64>(), 1.0);
                }
            }
        }
    }
}
