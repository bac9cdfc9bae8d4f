//! Multivariate Bernoulli naive Bayes with Laplace smoothing (alpha = 1).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::features::SparseMatrix;

/// Log-probabilities of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTable {
    pub log_prior: f64,
    /// ln P(column = 1 | class)
    pub log_on: Vec<f64>,
    /// ln P(column = 0 | class)
    pub log_off: Vec<f64>,
}

impl ClassTable {
    fn fit(matrix: &SparseMatrix, labels: &[bool], class: bool) -> ClassTable {
        let n_class = labels.iter().filter(|&&l| l == class).count() as f64;
        let mut on = alloc::vec![0.0; matrix.n_cols];
        for (row, &l) in matrix.rows.iter().zip(labels) {
            if l == class {
                for &c in row {
                    on[c as usize] += 1.0;
                }
            }
        }
        let probs: Vec<f64> = on.iter().map(|&k| (k + 1.0) / (n_class + 2.0)).collect();
        ClassTable {
            log_prior: libm::log(n_class / labels.len() as f64),
            log_on: probs.iter().map(|&p| libm::log(p)).collect(),
            log_off: probs.iter().map(|&p| libm::log(1.0 - p)).collect(),
        }
    }

    /// ln P(class) + ln P(row | class), up to the shared evidence term.
    pub fn joint(&self, row: &[u32]) -> f64 {
        let mut s = self.log_prior;
        let mut next = row.iter().peekable();
        for c in 0..self.log_on.len() {
            if next.peek().is_some_and(|&&r| r as usize == c) {
                next.next();
                s += self.log_on[c];
            } else {
                s += self.log_off[c];
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub positive: ClassTable,
    pub negative: ClassTable,
}

impl NaiveBayes {
    /// Both classes must be present.
    pub fn fit(matrix: &SparseMatrix, labels: &[bool]) -> NaiveBayes {
        NaiveBayes {
            positive: ClassTable::fit(matrix, labels, true),
            negative: ClassTable::fit(matrix, labels, false),
        }
    }

    /// ln P(pos | row) - ln P(neg | row).
    pub fn margin(&self, row: &[u32]) -> f64 {
        self.positive.joint(row) - self.negative.joint(row)
    }
}
