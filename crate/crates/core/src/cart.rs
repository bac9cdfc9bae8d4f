//! CART over binary columns with Gini impurity and weighted samples.
//!
//! Growth is unlimited: a node splits while it is impure and some column
//! takes both values in it, even when the best split gains nothing. Each
//! split's weighted impurity decrease is credited to its column.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::features::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Split {
        column: u32,
        /// Child for rows where the column is 0.
        inactive: u32,
        /// Child for rows where the column is 1.
        active: u32,
    },
    Leaf {
        positive: f64,
        negative: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Leaf weights reached by a sorted active-column row.
    pub fn leaf(&self, row: &[u32]) -> (f64, f64) {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                Node::Leaf { positive, negative } => return (*positive, *negative),
                Node::Split {
                    column,
                    inactive,
                    active,
                } => {
                    i = if row.binary_search(column).is_ok() {
                        *active as usize
                    } else {
                        *inactive as usize
                    };
                }
            }
        }
    }
}

/// Impurity differences below this count as ties.
const TIE: f64 = 1e-12;

pub fn gini(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// How candidate columns are picked at each node.
pub enum ColumnSampler<'r, R: Rng> {
    /// Every column; ties go to the lowest index.
    All,
    /// Random order, stopping after `k` columns that vary in the node.
    Random { k: usize, rng: &'r mut R },
}

pub struct Grown {
    pub tree: Tree,
    /// Weighted Gini decrease per column, divided by the root weight.
    pub importance: Vec<f64>,
}

/// Grows a tree. `weights[i]` is the multiplicity of row `i` (0 excludes it).
pub fn grow<R: Rng>(
    matrix: &SparseMatrix,
    labels: &[bool],
    weights: &[f64],
    mut sampler: ColumnSampler<'_, R>,
) -> Grown {
    let n_cols = matrix.n_cols;
    let mut importance = vec![0.0; n_cols];
    let root_rows: Vec<usize> = (0..matrix.len()).filter(|&i| weights[i] > 0.0).collect();
    let total_weight: f64 = root_rows.iter().map(|&i| weights[i]).sum();

    let mut nodes = vec![Node::Leaf {
        positive: 0.0,
        negative: 0.0,
    }];
    let mut stack = vec![(0usize, root_rows)];
    let mut col_pos = vec![0.0; n_cols];
    let mut col_tot = vec![0.0; n_cols];
    let mut touched: Vec<u32> = Vec::new();
    let mut order: Vec<u32> = (0..n_cols as u32).collect();

    while let Some((node, rows)) = stack.pop() {
        let mut pos = 0.0;
        let mut tot = 0.0;
        for &r in &rows {
            tot += weights[r];
            if labels[r] {
                pos += weights[r];
            }
        }
        let leaf = Node::Leaf {
            positive: pos,
            negative: tot - pos,
        };
        if pos == 0.0 || pos == tot {
            nodes[node] = leaf;
            continue;
        }

        for &c in &touched {
            col_pos[c as usize] = 0.0;
            col_tot[c as usize] = 0.0;
        }
        touched.clear();
        for &r in &rows {
            for &c in &matrix.rows[r] {
                if col_tot[c as usize] == 0.0 {
                    touched.push(c);
                }
                col_tot[c as usize] += weights[r];
                if labels[r] {
                    col_pos[c as usize] += weights[r];
                }
            }
        }

        let parent_impurity = gini(pos, tot);
        let mut best: Option<(u32, f64)> = None;
        let consider = |c: u32, best: &mut Option<(u32, f64)>| -> bool {
            let at = col_tot[c as usize];
            if at <= 0.0 || at >= tot {
                return false;
            }
            let ap = col_pos[c as usize];
            let (it, ip) = (tot - at, pos - ap);
            let child = (at * gini(ap, at) + it * gini(ip, it)) / tot;
            let better = match best {
                None => true,
                Some((bc, bv)) => child < *bv - TIE || (child <= *bv + TIE && c < *bc),
            };
            if better {
                *best = Some((c, child));
            }
            true
        };
        match &mut sampler {
            ColumnSampler::All => {
                touched.sort_unstable();
                for &c in &touched {
                    consider(c, &mut best);
                }
            }
            ColumnSampler::Random { k, rng } => {
                let mut varying = 0;
                for i in 0..n_cols {
                    let j = rng.random_range(i..n_cols);
                    order.swap(i, j);
                    if consider(order[i], &mut best) {
                        varying += 1;
                        if varying >= *k {
                            break;
                        }
                    }
                }
            }
        }

        let Some((column, child_impurity)) = best else {
            nodes[node] = leaf;
            continue;
        };
        importance[column as usize] += tot * (parent_impurity - child_impurity) / total_weight;
        let (act, inact): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| matrix.rows[r].binary_search(&column).is_ok());
        let inactive = nodes.len();
        let active = inactive + 1;
        nodes.push(leaf.clone());
        nodes.push(leaf);
        nodes[node] = Node::Split {
            column,
            inactive: inactive as u32,
            active: active as u32,
        };
        stack.push((active, act));
        stack.push((inactive, inact));
    }
    Grown {
        tree: Tree { nodes },
        importance,
    }
}
