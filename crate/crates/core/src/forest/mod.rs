//! Random forest: bagged, unpruned CART trees with a random feature subset
//! at every split, combined by majority vote.
//!
//! Tree `i` draws its bootstrap sample and feature subsets from a ChaCha
//! stream keyed by `(seed, i)`, so the forest is the same whether trees are
//! grown serially or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::AttackClass;
use crate::matrix::Matrix;

mod tree;

pub use tree::{
    best_split, gini, grow_tree, midpoint, node_counts, weighted_child_impurity, Split, TreeNode, TreeParams,
};

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("gini of an empty node")]
    EmptyNode,
    #[error("no training examples")]
    EmptyData,
    #[error("{features} feature rows but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("input has {actual} features, forest expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid forest parameters: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until the other stopping rules apply.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features considered per split; `None` means `floor(sqrt(n_features))`.
    pub mtry: Option<usize>,
    /// When false every tree sees the full training set once, in order.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_depth: None, min_samples_split: 2, mtry: None, bootstrap: true }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, n_features: usize) -> Result<usize, ForestError> {
        let mtry = self.mtry.unwrap_or_else(|| ((n_features as f64).sqrt().floor() as usize).max(1));
        if mtry == 0 || mtry > n_features {
            return Err(ForestError::InvalidParams(format!("mtry {mtry} outside 1..={n_features}")));
        }
        Ok(mtry)
    }

    fn validate(&self) -> Result<(), ForestError> {
        if self.n_trees == 0 {
            return Err(ForestError::InvalidParams("n_trees must be positive".into()));
        }
        if self.min_samples_split == 0 {
            return Err(ForestError::InvalidParams("min_samples_split must be positive".into()));
        }
        Ok(())
    }
}

/// How trees are scheduled during training. Both give identical forests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Serial,
    Parallel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    trees: Vec<TreeNode>,
    n_features: usize,
    mtry: usize,
    seed: u64,
    params: ForestParams,
}

/// Majority-vote result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub class: AttackClass,
    pub votes: [usize; 5],
}

/// Random stream of tree `tree_index`.
pub fn tree_rng(seed: u64, tree_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index as u64);
    rng
}

/// `n` indices drawn uniformly with replacement from `0..n`.
pub fn bootstrap_sample<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn train_forest(
    features: &Matrix,
    labels: &[AttackClass],
    params: &ForestParams,
    seed: u64,
) -> Result<Forest, ForestError> {
    train_forest_with(features, labels, params, seed, Schedule::Parallel)
}

pub fn train_forest_with(
    features: &Matrix,
    labels: &[AttackClass],
    params: &ForestParams,
    seed: u64,
    schedule: Schedule,
) -> Result<Forest, ForestError> {
    params.validate()?;
    if features.is_empty() {
        return Err(ForestError::EmptyData);
    }
    if features.rows() != labels.len() {
        return Err(ForestError::LengthMismatch { features: features.rows(), labels: labels.len() });
    }
    let n_features = features.cols();
    let mtry = params.resolved_mtry(n_features)?;
    let tree_params = TreeParams { max_depth: params.max_depth, min_samples_split: params.min_samples_split, mtry };
    let grow_one = |i: usize| {
        let mut rng = tree_rng(seed, i);
        let sample: Vec<usize> =
            if params.bootstrap { bootstrap_sample(features.rows(), &mut rng) } else { (0..features.rows()).collect() };
        grow_tree(features, labels, &sample, &tree_params, &mut rng)
    };
    let trees = match schedule {
        Schedule::Serial => (0..params.n_trees).map(grow_one).collect(),
        Schedule::Parallel => (0..params.n_trees).into_par_iter().map(grow_one).collect(),
    };
    Ok(Forest { trees, n_features, mtry, seed, params: params.clone() })
}

impl Forest {
    /// Reassembles a forest from stored parts, checking its invariants.
    pub fn from_parts(
        trees: Vec<TreeNode>,
        n_features: usize,
        mtry: usize,
        seed: u64,
        params: ForestParams,
    ) -> Result<Forest, ForestError> {
        if trees.is_empty() {
            return Err(ForestError::InvalidParams("forest has no trees".into()));
        }
        if mtry == 0 || mtry > n_features {
            return Err(ForestError::InvalidParams(format!("mtry {mtry} outside 1..={n_features}")));
        }
        if let Some(f) = trees.iter().filter_map(TreeNode::max_feature).max() {
            if f >= n_features {
                return Err(ForestError::InvalidParams(format!("split on feature {f} of {n_features}")));
            }
        }
        Ok(Forest { trees, n_features, mtry, seed, params })
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn mtry(&self) -> usize {
        self.mtry
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    /// Majority vote of the trees; ties go to the earliest class.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ForestError> {
        if x.len() != self.n_features {
            return Err(ForestError::DimensionMismatch { expected: self.n_features, actual: x.len() });
        }
        let mut votes = [0; 5];
        for tree in &self.trees {
            votes[tree.predict(x).index()] += 1;
        }
        Ok(Prediction { class: AttackClass::argmax(&votes), votes })
    }

    pub fn predict_matrix(&self, data: &Matrix) -> Result<Vec<AttackClass>, ForestError> {
        if data.cols() != self.n_features {
            return Err(ForestError::DimensionMismatch { expected: self.n_features, actual: data.cols() });
        }
        Ok((0..data.rows())
            .into_par_iter()
            .map(|i| self.predict(data.row(i)).expect("dimension checked").class)
            .collect())
    }
}
