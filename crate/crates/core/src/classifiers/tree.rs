//! CART decision tree: Gini impurity, unlimited depth, lowest column wins
//! ties.

use alloc::vec;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cart::{grow, ColumnSampler, Tree};
use crate::features::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub tree: Tree,
}

impl DecisionTree {
    pub fn fit(matrix: &SparseMatrix, labels: &[bool]) -> DecisionTree {
        let weights = vec![1.0; matrix.len()];
        let grown = grow::<ChaCha8Rng>(matrix, labels, &weights, ColumnSampler::All);
        DecisionTree { tree: grown.tree }
    }

    /// Positive fraction of the reached leaf minus 0.5.
    pub fn score(&self, row: &[u32]) -> f64 {
        let (p, n) = self.tree.leaf(row);
        if p + n == 0.0 {
            return -0.5;
        }
        p / (p + n) - 0.5
    }
}
