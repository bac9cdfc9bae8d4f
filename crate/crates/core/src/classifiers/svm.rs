//! L2-regularized hinge-loss linear SVM trained by dual coordinate descent.
//!
//! The bias is an extra always-on feature and is regularized like the
//! weights. Identical (row, label) examples are merged into one dual
//! variable with box constraint `C * multiplicity`, which leaves the
//! optimum unchanged.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    /// Stop when (primal + dual) / |primal| falls to this value.
    pub tolerance: f64,
    pub max_epochs: usize,
    /// Seeds the per-epoch visiting order.
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-4,
            max_epochs: 5000,
            seed: 42,
        }
    }
}

/// Objectives after one pass over the examples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmEpoch {
    pub epoch: usize,
    /// Dual objective in minimization form, 0.5 |w|^2 - sum(alpha).
    pub dual: f64,
    /// 0.5 |w|^2 + C * sum(hinge).
    pub primal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub epochs: usize,
    pub converged: bool,
}

struct Example<'a> {
    row: &'a [u32],
    y: f64,
    upper: f64,
    q: f64,
}

fn margin(w: &[f64], b: f64, row: &[u32]) -> f64 {
    row.iter().map(|&c| w[c as usize]).sum::<f64>() + b
}

fn norm2(w: &[f64], b: f64) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>() + b * b
}

impl LinearSvm {
    /// Fits the model and returns it with the per-epoch trace.
    pub fn fit(matrix: &SparseMatrix, labels: &[bool], config: &SvmConfig) -> (LinearSvm, Vec<SvmEpoch>) {
        let mut merged: BTreeMap<(&[u32], bool), f64> = BTreeMap::new();
        for (row, &l) in matrix.rows.iter().zip(labels) {
            *merged.entry((row.as_slice(), l)).or_insert(0.0) += 1.0;
        }
        let examples: Vec<Example> = merged
            .into_iter()
            .map(|((row, l), m)| Example {
                row,
                y: if l { 1.0 } else { -1.0 },
                upper: config.c * m,
                q: row.len() as f64 + 1.0,
            })
            .collect();

        let mut w = vec![0.0; matrix.n_cols];
        let mut b = 0.0;
        let mut alpha = vec![0.0; examples.len()];
        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut trace = Vec::new();
        let mut converged = false;

        for epoch in 1..=config.max_epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let e = &examples[i];
                let g = e.y * margin(&w, b, e.row) - 1.0;
                let a = alpha[i];
                let next = (a - g / e.q).clamp(0.0, e.upper);
                let delta = next - a;
                if delta != 0.0 {
                    alpha[i] = next;
                    let step = delta * e.y;
                    for &c in e.row {
                        w[c as usize] += step;
                    }
                    b += step;
                }
            }
            let half = 0.5 * norm2(&w, b);
            let dual = half - alpha.iter().sum::<f64>();
            let hinge: f64 = examples
                .iter()
                .map(|e| e.upper * (1.0 - e.y * margin(&w, b, e.row)).max(0.0))
                .sum();
            let primal = half + hinge;
            trace.push(SvmEpoch { epoch, dual, primal });
            let gap = primal + dual;
            if gap <= config.tolerance * primal.abs().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!("SVM stopped after {} epochs without reaching tolerance", config.max_epochs);
        }
        let svm = LinearSvm {
            weights: w,
            bias: b,
            epochs: trace.len(),
            converged,
        };
        (svm, trace)
    }

    /// w . x + b
    pub fn decision(&self, row: &[u32]) -> f64 {
        margin(&self.weights, self.bias, row)
    }
}
