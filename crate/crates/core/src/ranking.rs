//! Feature rankings: FREQ (activation counts on unlabeled candidates),
//! CHI2 (Pearson chi-squared per column), GAIN (information gain per
//! feature) and FOREST (random-forest Gini importance).
//!
//! Column-level scores are turned into feature-level rankings by
//! "stripping": each feature keeps the score of its best-ranked column.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cart::{grow, ColumnSampler};
use crate::error::{Error, Result};
use crate::features::{ColumnDictionary, FeatureId, FeatureValue, FeatureVector, SparseMatrix};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingMethod {
    Freq,
    Chi2,
    Gain,
    Forest,
}

impl RankingMethod {
    pub const ALL: [RankingMethod; 4] = [
        RankingMethod::Freq,
        RankingMethod::Chi2,
        RankingMethod::Gain,
        RankingMethod::Forest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RankingMethod::Freq => "freq",
            RankingMethod::Chi2 => "chi2",
            RankingMethod::Gain => "gain",
            RankingMethod::Forest => "forest",
        }
    }

    pub fn parse(s: &str) -> Option<RankingMethod> {
        RankingMethod::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for RankingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub feature: FeatureId,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub method: RankingMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fingerprint of the producing corpus and configuration.
    #[serde(default)]
    pub provenance: String,
    pub entries: Vec<RankEntry>,
}

impl FeatureRanking {
    pub fn features(&self) -> Vec<FeatureId> {
        self.entries.iter().map(|e| e.feature.clone()).collect()
    }

    pub fn top(&self, k: usize) -> Vec<FeatureId> {
        self.entries.iter().take(k).map(|e| e.feature.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Score descending, then key ascending.
fn by_score<K: Ord>(a: &(K, f64), b: &(K, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

/// Sorts (feature, value) scores and keeps each feature's first occurrence.
pub fn strip_values<V: Ord>(mut pairs: Vec<((FeatureId, V), f64)>) -> Vec<RankEntry> {
    pairs.sort_by(by_score);
    let mut seen = alloc::collections::BTreeSet::new();
    let mut out = Vec::new();
    for ((feature, _), score) in pairs {
        if seen.insert(feature.clone()) {
            out.push(RankEntry { feature, score });
        }
    }
    out
}

fn ranking(method: RankingMethod, entries: Vec<RankEntry>, seed: Option<u64>) -> FeatureRanking {
    FeatureRanking {
        method,
        seed,
        provenance: String::new(),
        entries,
    }
}

/// Ranks activated (feature, value) pairs by count, then strips values.
/// Labels are not needed.
pub fn rank_freq(vectors: &[FeatureVector]) -> Result<FeatureRanking> {
    if vectors.is_empty() {
        return Err(Error::Empty("candidate list".into()));
    }
    let mut counts: BTreeMap<(FeatureId, FeatureValue), usize> = BTreeMap::new();
    for v in vectors {
        for (f, value) in v.active_pairs() {
            *counts.entry((f.clone(), value.clone())).or_insert(0) += 1;
        }
    }
    let pairs = counts.into_iter().map(|(k, n)| (k, n as f64)).collect();
    Ok(ranking(RankingMethod::Freq, strip_values(pairs), None))
}

fn check_classes(labels: &[bool], what: &str) -> Result<()> {
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::MissingClass(what.into()));
    }
    Ok(())
}

/// Pearson chi-squared of a 2x2 contingency table `[[a, b], [c, d]]`
/// (rows: column active / inactive; columns: positive / negative), summed
/// over the four cells as (O - E)^2 / E. No continuity correction.
pub fn chi2_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    let rows = [a + b, c + d];
    let cols = [a + c, b + d];
    let observed = [[a, b], [c, d]];
    let mut chi = 0.0;
    for (i, row) in observed.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = rows[i] * cols[j] / n;
            if e > 0.0 {
                chi += (o - e) * (o - e) / e;
            }
        }
    }
    chi
}

/// Per-column (active positives, active total).
fn column_counts(matrix: &SparseMatrix, labels: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let mut pos = vec![0.0; matrix.n_cols];
    let mut tot = vec![0.0; matrix.n_cols];
    for (row, &l) in matrix.rows.iter().zip(labels) {
        for &c in row {
            tot[c as usize] += 1.0;
            if l {
                pos[c as usize] += 1.0;
            }
        }
    }
    (pos, tot)
}

fn check_rows(matrix: &SparseMatrix, labels: &[bool]) -> Result<()> {
    if matrix.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: matrix.len(),
            right: labels.len(),
        });
    }
    Ok(())
}

/// Chi-squared score of every non-constant column.
pub fn chi2_scores(matrix: &SparseMatrix, labels: &[bool]) -> Result<Vec<Option<f64>>> {
    check_rows(matrix, labels)?;
    check_classes(labels, "chi2 ranking")?;
    let n = labels.len() as f64;
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let (pos, tot) = column_counts(matrix, labels);
    Ok((0..matrix.n_cols)
        .map(|c| {
            if tot[c] == 0.0 || tot[c] == n {
                return None;
            }
            let a = pos[c];
            let b = tot[c] - a;
            let cc = n_pos - a;
            let d = n - tot[c] - cc;
            Some(chi2_2x2(a, b, cc, d))
        })
        .collect())
}

fn column_pairs(dict: &ColumnDictionary, scores: &[Option<f64>]) -> Vec<((FeatureId, u32), f64)> {
    let dropped = scores.iter().filter(|s| s.is_none()).count();
    if dropped > 0 {
        info!("{dropped} zero-variance columns dropped before ranking");
    }
    scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| ((dict.column(i as u32).feature.clone(), i as u32), s)))
        .collect()
}

pub fn rank_chi2(matrix: &SparseMatrix, dict: &ColumnDictionary, labels: &[bool]) -> Result<FeatureRanking> {
    let scores = chi2_scores(matrix, labels)?;
    Ok(ranking(RankingMethod::Chi2, strip_values(column_pairs(dict, &scores)), None))
}

fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// Binary entropy in bits of a (positive, total) split.
pub fn entropy(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for k in [pos, total - pos] {
        if k > 0.0 {
            let p = k / total;
            h -= p * log2(p);
        }
    }
    h
}

/// H(labels) - sum_v |S_v|/|S| H(labels | value = v), base 2. `None`
/// (feature absent) counts as its own value.
pub fn information_gain(values: &[Option<&FeatureValue>], labels: &[bool]) -> f64 {
    let n = labels.len() as f64;
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut parts: BTreeMap<Option<&FeatureValue>, (f64, f64)> = BTreeMap::new();
    for (v, &l) in values.iter().zip(labels) {
        let e = parts.entry(*v).or_insert((0.0, 0.0));
        e.1 += 1.0;
        if l {
            e.0 += 1.0;
        }
    }
    let conditional: f64 = parts.values().map(|&(p, t)| t / n * entropy(p, t)).sum();
    (entropy(n_pos, n) - conditional).max(0.0)
}

/// Gain of every feature occurring in `vectors`; constant features are
/// dropped.
pub fn rank_gain(vectors: &[FeatureVector], labels: &[bool]) -> Result<FeatureRanking> {
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: vectors.len(),
            right: labels.len(),
        });
    }
    check_classes(labels, "gain ranking")?;
    let mut features = alloc::collections::BTreeSet::new();
    for v in vectors {
        features.extend(v.values.keys().cloned());
    }
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for f in features {
        let values: Vec<Option<&FeatureValue>> = vectors.iter().map(|v| v.get(&f)).collect();
        if values.iter().all(|v| *v == values[0]) {
            dropped += 1;
            continue;
        }
        pairs.push(((f, ()), information_gain(&values, labels)));
    }
    if dropped > 0 {
        info!("{dropped} constant features dropped before gain ranking");
    }
    Ok(ranking(RankingMethod::Gain, strip_values(pairs), None))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub trees: usize,
    pub seed: u64,
    /// Bootstrap-resample rows for each tree.
    pub bootstrap: bool,
    /// Columns tried per split; `None` means floor(sqrt(columns)).
    pub max_features: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            trees: 10,
            seed: DEFAULT_SEED,
            bootstrap: true,
            max_features: None,
        }
    }
}

/// Row order independent of the input order: rows sorted by (columns,
/// label), returned as indices.
fn canonical_order(matrix: &SparseMatrix, labels: &[bool]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..matrix.len()).collect();
    idx.sort_by(|&a, &b| (&matrix.rows[a], labels[a]).cmp(&(&matrix.rows[b], labels[b])));
    idx
}

/// Normalized mean Gini importance per column.
pub fn forest_importance(matrix: &SparseMatrix, labels: &[bool], config: &ForestConfig) -> Result<Vec<f64>> {
    if config.trees < 1 {
        return Err(Error::InvalidArgument("forest needs at least one tree".into()));
    }
    check_rows(matrix, labels)?;
    check_classes(labels, "forest ranking")?;
    let order = canonical_order(matrix, labels);
    let sorted = matrix.select_rows(&order);
    let sorted_labels: Vec<bool> = order.iter().map(|&i| labels[i]).collect();
    let n = sorted.len();
    let k = config
        .max_features
        .unwrap_or_else(|| libm::floor(libm::sqrt(matrix.n_cols as f64)) as usize)
        .max(1);

    let mut total = vec![0.0; matrix.n_cols];
    for t in 0..config.trees {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(t as u64);
        let weights = if config.bootstrap {
            let mut w = vec![0.0; n];
            for _ in 0..n {
                w[rng.random_range(0..n)] += 1.0;
            }
            w
        } else {
            vec![1.0; n]
        };
        let grown = grow(
            &sorted,
            &sorted_labels,
            &weights,
            ColumnSampler::Random { k, rng: &mut rng },
        );
        for (acc, x) in total.iter_mut().zip(&grown.importance) {
            *acc += x / config.trees as f64;
        }
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        for x in &mut total {
            *x /= sum;
        }
    }
    Ok(total)
}

pub fn rank_forest(
    matrix: &SparseMatrix,
    dict: &ColumnDictionary,
    labels: &[bool],
    config: &ForestConfig,
) -> Result<FeatureRanking> {
    let importance = forest_importance(matrix, labels, config)?;
    let (_, tot) = column_counts(matrix, labels);
    let n = labels.len() as f64;
    let scores: Vec<Option<f64>> = importance
        .iter()
        .zip(&tot)
        .map(|(&imp, &t)| (t > 0.0 && t < n).then_some(imp))
        .collect();
    Ok(ranking(
        RankingMethod::Forest,
        strip_values(column_pairs(dict, &scores)),
        Some(config.seed),
    ))
}

/// Human-readable one-line summary.
pub fn describe(r: &FeatureRanking, k: usize) -> String {
    let mut s = format!("{}:", r.method);
    for e in r.entries.iter().take(k) {
        s.push_str(&format!(" {}({:.4})", e.feature, e.score));
    }
    s
}
