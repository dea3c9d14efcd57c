//! Class-stratified subsampling for desk-scale runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AttackClass, DatasetError, LabeledExample};

/// Picks `round(fraction * n_c)` indices from each class `c` (at least one
/// when the class is non-empty) and returns them in ascending order.
pub fn stratified_indices(classes: &[AttackClass], fraction: f64, seed: u64) -> Result<Vec<usize>, DatasetError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(DatasetError::InvalidFraction(fraction));
    }
    let mut by_class: [Vec<usize>; 5] = Default::default();
    for (i, c) in classes.iter().enumerate() {
        by_class[c.index()].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::new();
    for members in &by_class {
        if members.is_empty() {
            continue;
        }
        let take = ((fraction * members.len() as f64).round() as usize).clamp(1, members.len());
        picked.extend(rand::seq::index::sample(&mut rng, members.len(), take).into_iter().map(|j| members[j]));
    }
    picked.sort_unstable();
    Ok(picked)
}

pub fn stratified_subsample(
    examples: &[LabeledExample],
    fraction: f64,
    seed: u64,
) -> Result<Vec<LabeledExample>, DatasetError> {
    let classes: Vec<AttackClass> = examples.iter().map(|e| e.class).collect();
    Ok(stratified_indices(&classes, fraction, seed)?.into_iter().map(|i| examples[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::class_counts;

    fn examples(sizes: [usize; 5]) -> Vec<LabeledExample> {
        let mut out = Vec::new();
        for (c, &n) in AttackClass::ALL.iter().zip(&sizes) {
            for i in 0..n {
                out.push(LabeledExample { features: vec![i as f64], class: *c });
            }
        }
        out
    }

    #[test]
    fn full_fraction_is_identity() {
        let ex = examples([5, 3, 0, 2, 1]);
        assert_eq!(stratified_subsample(&ex, 1.0, 9).unwrap(), ex);
    }

    #[test]
    fn per_class_rounding_with_minimum_one() {
        let ex = examples([1000, 10, 0, 0, 0]);
        let sub = stratified_subsample(&ex, 0.1, 1).unwrap();
        let classes: Vec<_> = sub.iter().map(|e| e.class).collect();
        assert_eq!(class_counts(&classes), [100, 1, 0, 0, 0]);

        let ex = examples([20, 3, 1, 0, 4]);
        let classes: Vec<_> = ex.iter().map(|e| e.class).collect();
        let idx = stratified_indices(&classes, 0.1, 1).unwrap();
        let sub: Vec<_> = idx.iter().map(|&i| classes[i]).collect();
        assert_eq!(class_counts(&sub), [2, 1, 1, 0, 1]);
    }

    #[test]
    fn deterministic_for_seed() {
        let ex = examples([300, 200, 50, 7, 3]);
        let a = stratified_subsample(&ex, 0.25, 42).unwrap();
        let b = stratified_subsample(&ex, 0.25, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_subsample(&ex, 0.25, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_fraction() {
        let ex = examples([3, 0, 0, 0, 0]);
        for f in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(stratified_subsample(&ex, f, 0), Err(DatasetError::InvalidFraction(_))));
        }
    }
}
