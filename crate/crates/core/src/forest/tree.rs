//! CART classification trees with Gini impurity.

use std::cmp::Ordering;

use rand::Rng;

use super::ForestError;
use crate::dataset::AttackClass;
use crate::matrix::Matrix;

/// Gini impurity `1 - sum_c p_c^2` of a node with the given class counts.
pub fn gini(class_counts: &[usize; 5]) -> Result<f64, ForestError> {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(ForestError::EmptyNode);
    }
    Ok(gini_nonempty(class_counts, total))
}

#[inline]
fn gini_nonempty(counts: &[usize; 5], total: usize) -> f64 {
    let t = total as f64;
    let mut sum_sq = 0.0;
    for &c in counts {
        let p = c as f64 / t;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

/// Count-weighted mean impurity of the two children of a split.
#[inline]
pub fn weighted_child_impurity(left: &[usize; 5], right: &[usize; 5]) -> f64 {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let gl = if nl == 0 { 0.0 } else { gini_nonempty(left, nl) };
    let gr = if nr == 0 { 0.0 } else { gini_nonempty(right, nr) };
    (nl as f64 * gl + nr as f64 * gr) / (nl + nr) as f64
}

/// Threshold between two consecutive distinct values `a < b`. Values
/// `<= threshold` go left, so the result always satisfies `a <= t < b`.
#[inline]
pub fn midpoint(a: f64, b: f64) -> f64 {
    let m = (a + b) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Count-weighted mean Gini of the two children.
    pub impurity: f64,
}

/// Exact ranking key for a partition: `sum_L c^2 / n_L + sum_R c^2 / n_R`
/// as a fraction. Larger means lower weighted Gini, and integer comparison
/// keeps mathematically equal candidates tied.
#[derive(Clone, Copy, Debug)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of(left: &[usize; 5], right: &[usize; 5]) -> Purity {
        let sq = |c: &[usize; 5]| c.iter().map(|&v| (v as u128) * (v as u128)).sum::<u128>();
        let nl = left.iter().sum::<usize>() as u128;
        let nr = right.iter().sum::<usize>() as u128;
        Purity { num: sq(left) * nr + sq(right) * nl, den: nl * nr }
    }

    fn of_node(counts: &[usize; 5]) -> Purity {
        let n = counts.iter().sum::<usize>() as u128;
        Purity { num: counts.iter().map(|&v| (v as u128) * (v as u128)).sum(), den: n }
    }

    fn cmp(&self, other: &Purity) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

pub fn node_counts(labels: &[AttackClass], indices: &[usize]) -> [usize; 5] {
    let mut counts = [0; 5];
    for &i in indices {
        counts[labels[i].index()] += 1;
    }
    counts
}

/// Best Gini split of the examples `indices` over the candidate features.
///
/// Every midpoint between consecutive distinct values of every candidate
/// feature is evaluated. Returns `None` when no candidate lowers the
/// impurity below the parent's.
pub fn best_split(
    features: &Matrix,
    labels: &[AttackClass],
    indices: &[usize],
    feature_subset: &[usize],
) -> Option<Split> {
    if indices.is_empty() {
        return None;
    }
    let parent = node_counts(labels, indices);
    let parent_purity = Purity::of_node(&parent);
    let mut best: Option<(Split, Purity)> = None;
    let mut column: Vec<(f64, usize)> = Vec::with_capacity(indices.len());
    for &f in feature_subset {
        column.clear();
        column.extend(indices.iter().map(|&i| (features.get(i, f), labels[i].index())));
        column.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut left = [0usize; 5];
        let mut right = parent;
        for k in 0..column.len() - 1 {
            let (v, c) = column[k];
            left[c] += 1;
            right[c] -= 1;
            let next = column[k + 1].0;
            if v == next {
                continue;
            }
            let purity = Purity::of(&left, &right);
            if purity.cmp(&parent_purity).is_le() {
                continue;
            }
            // thresholds rise within a feature, so an equal score only wins
            // by coming from a lower feature
            let wins = best.as_ref().is_none_or(|(b, bp)| match purity.cmp(bp) {
                Ordering::Greater => true,
                Ordering::Equal => f < b.feature,
                Ordering::Less => false,
            });
            if wins {
                let split = Split {
                    feature: f,
                    threshold: midpoint(v, next),
                    impurity: weighted_child_impurity(&left, &right),
                };
                best = Some((split, purity));
            }
        }
    }
    best.map(|(split, _)| split)
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: Box<TreeNode>, right: Box<TreeNode> },
    Leaf { class: AttackClass, class_counts: [usize; 5] },
}

impl TreeNode {
    pub fn leaf(class_counts: [usize; 5]) -> TreeNode {
        TreeNode::Leaf { class: AttackClass::argmax(&class_counts), class_counts }
    }

    /// Routes `x` to a leaf (`x[feature] <= threshold` goes left).
    pub fn predict(&self, x: &[f64]) -> AttackClass {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { class, .. } => return *class,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    /// Largest feature index used by any split, if any.
    pub fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { feature, left, right, .. } => {
                Some((*feature).max(left.max_feature().unwrap_or(0)).max(right.max_feature().unwrap_or(0)))
            }
        }
    }
}

/// Stopping and feature-sampling rules for one tree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub mtry: usize,
}

/// Grows an unpruned CART tree on the examples `indices` (duplicates
/// allowed). Each split considers `mtry` distinct features drawn from `rng`.
pub fn grow_tree<R: Rng>(
    features: &Matrix,
    labels: &[AttackClass],
    indices: &[usize],
    params: &TreeParams,
    rng: &mut R,
) -> TreeNode {
    grow(features, labels, indices.to_vec(), params, rng, 0)
}

fn grow<R: Rng>(
    features: &Matrix,
    labels: &[AttackClass],
    indices: Vec<usize>,
    params: &TreeParams,
    rng: &mut R,
    depth: usize,
) -> TreeNode {
    let counts = node_counts(labels, &indices);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_reached = params.max_depth.is_some_and(|d| depth >= d);
    if pure || depth_reached || indices.len() < params.min_samples_split {
        return TreeNode::leaf(counts);
    }
    let subset = rand::seq::index::sample(rng, features.cols(), params.mtry).into_vec();
    let Some(split) = best_split(features, labels, &indices, &subset) else {
        return TreeNode::leaf(counts);
    };
    let (left, right): (Vec<usize>, Vec<usize>) =
        indices.into_iter().partition(|&i| features.get(i, split.feature) <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(features, labels, left, params, rng, depth + 1)),
        right: Box::new(grow(features, labels, right, params, rng, depth + 1)),
    }
}
