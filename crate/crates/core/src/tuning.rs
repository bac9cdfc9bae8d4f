//! Greedy feature-count selection under k-fold cross-validation.
//!
//! Candidates are shuffled once with the seed and cut into near-equal
//! unstratified folds, so every feature count is scored on the same folds.
//! The column dictionary of each fold is rebuilt from its training part.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train_vectors, ClassifierKind, TrainConfig};
use crate::error::{Error, Result};
use crate::extraction::Candidate;
use crate::features::{FeatureId, FeatureVector};
use crate::metrics::{mean_std, Counts};
use crate::ranking::{FeatureRanking, RankingMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    /// Shuffle before slicing; `false` keeps corpus order.
    pub shuffle: bool,
    pub train: TrainConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 42,
            shuffle: true,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub fold: usize,
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    /// The training part had a single class.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub mean_p: f64,
    pub mean_r: f64,
    pub mean_f: f64,
    /// Population standard deviation of the fold F-scores.
    pub sigma: f64,
    pub folds: Vec<FoldScore>,
}

impl CvResult {
    pub fn from_folds(mut folds: Vec<FoldScore>) -> CvResult {
        folds.sort_by_key(|f| f.fold);
        let p: Vec<f64> = folds.iter().map(|f| f.precision).collect();
        let r: Vec<f64> = folds.iter().map(|f| f.recall).collect();
        let fs: Vec<f64> = folds.iter().map(|f| f.f).collect();
        let (mean_f, sigma) = mean_std(&fs);
        CvResult {
            mean_p: mean_std(&p).0,
            mean_r: mean_std(&r).0,
            mean_f,
            sigma,
            folds,
        }
    }

    pub fn degenerate_folds(&self) -> usize {
        self.folds.iter().filter(|f| f.degenerate).count()
    }
}

/// Labels of labeled candidates; errors on any unknown label.
pub fn candidate_labels(candidates: &[Candidate]) -> Result<Vec<bool>> {
    candidates
        .iter()
        .map(|c| {
            c.label.as_bool().ok_or_else(|| {
                Error::Unlabeled(format!("candidate in sentence '{}' has no label", c.sent_id))
            })
        })
        .collect()
}

/// Test indices of each fold. The first `n % folds` folds get one extra
/// element.
pub fn fold_assignment(n: usize, folds: usize, seed: u64, shuffle: bool) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if folds > n {
        return Err(Error::InvalidArgument(format!(
            "{folds} folds requested for {n} candidates"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let (base, extra) = (n / folds, n % folds);
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        out.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(out)
}

fn check_lengths(vectors: &[FeatureVector], labels: &[bool]) -> Result<()> {
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: vectors.len(),
            right: labels.len(),
        });
    }
    Ok(())
}

/// Trains on everything outside `test` and scores the positive class on
/// `test`.
pub fn evaluate_fold(
    kind: ClassifierKind,
    vectors: &[FeatureVector],
    labels: &[bool],
    selected: &[FeatureId],
    fold: usize,
    test: &[usize],
    config: &TrainConfig,
) -> Result<FoldScore> {
    check_lengths(vectors, labels)?;
    let mut in_test = alloc::vec![false; vectors.len()];
    for &i in test {
        in_test[i] = true;
    }
    let train_idx: Vec<usize> = (0..vectors.len()).filter(|&i| !in_test[i]).collect();
    let train_vecs: Vec<FeatureVector> = train_idx.iter().map(|&i| vectors[i].clone()).collect();
    let train_labels: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
    let model = train_vectors(kind, &train_vecs, &train_labels, selected, config)?;
    let mut predicted = Vec::with_capacity(test.len());
    let mut gold = Vec::with_capacity(test.len());
    for &i in test {
        predicted.push(model.predict(&vectors[i])?.label);
        gold.push(labels[i]);
    }
    let counts = Counts::from_labels(&predicted, &gold)?;
    Ok(FoldScore {
        fold,
        counts,
        precision: counts.precision(),
        recall: counts.recall(),
        f: counts.f1(),
        degenerate: model.is_constant(),
    })
}

/// Mean P/R/F and F spread over the folds for one feature set.
pub fn cross_validate(
    vectors: &[FeatureVector],
    labels: &[bool],
    selected: &[FeatureId],
    kind: ClassifierKind,
    config: &CvConfig,
) -> Result<CvResult> {
    check_lengths(vectors, labels)?;
    let folds = fold_assignment(vectors.len(), config.folds, config.seed, config.shuffle)?;
    let scores = folds
        .iter()
        .enumerate()
        .map(|(f, test)| evaluate_fold(kind, vectors, labels, selected, f, test, &config.train))
        .collect::<Result<Vec<_>>>()?;
    Ok(CvResult::from_folds(scores))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub mean_f: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub method: RankingMethod,
    pub classifier: ClassifierKind,
    pub folds: usize,
    pub seed: u64,
    pub best_k: usize,
    pub selected_features: Vec<FeatureId>,
    pub mean_p: f64,
    pub mean_r: f64,
    pub mean_f: f64,
    pub sigma: f64,
    /// F of each fold at `best_k`.
    pub fold_f: Vec<f64>,
    /// Folds at `best_k` whose training part had one class.
    pub degenerate_folds: usize,
    pub per_k_curve: Vec<CurvePoint>,
}

/// Picks the best prefix length from per-k CV results (`per_k[i]` is for
/// k = i + 1). Ties go to the smallest k.
pub fn select_best(
    ranking: &FeatureRanking,
    kind: ClassifierKind,
    config: &CvConfig,
    per_k: Vec<CvResult>,
) -> Result<TuningResult> {
    if per_k.is_empty() || per_k.len() != ranking.len() {
        return Err(Error::InvalidArgument(format!(
            "{} CV results for a ranking of {} features",
            per_k.len(),
            ranking.len()
        )));
    }
    let mut best = 0;
    for (i, r) in per_k.iter().enumerate() {
        if r.mean_f > per_k[best].mean_f {
            best = i;
        }
    }
    let per_k_curve = per_k
        .iter()
        .enumerate()
        .map(|(i, r)| CurvePoint {
            k: i + 1,
            mean_f: r.mean_f,
            sigma: r.sigma,
        })
        .collect();
    let b = &per_k[best];
    Ok(TuningResult {
        method: ranking.method,
        classifier: kind,
        folds: config.folds,
        seed: config.seed,
        best_k: best + 1,
        selected_features: ranking.top(best + 1),
        mean_p: b.mean_p,
        mean_r: b.mean_r,
        mean_f: b.mean_f,
        sigma: b.sigma,
        fold_f: b.folds.iter().map(|f| f.f).collect(),
        degenerate_folds: b.degenerate_folds(),
        per_k_curve,
    })
}

/// Cross-validates every prefix of `ranking` and keeps the best.
pub fn greedy_tune(
    ranking: &FeatureRanking,
    vectors: &[FeatureVector],
    labels: &[bool],
    kind: ClassifierKind,
    config: &CvConfig,
) -> Result<TuningResult> {
    if ranking.is_empty() {
        return Err(Error::Empty("ranking".into()));
    }
    let features = ranking.features();
    let per_k = (1..=features.len())
        .map(|k| cross_validate(vectors, labels, &features[..k], kind, config))
        .collect::<Result<Vec<_>>>()?;
    select_best(ranking, kind, config, per_k)
}
