//! Stage helpers shared by the subcommands and the pipeline.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use vmwe_core::classifiers::Prediction;
use vmwe_core::extraction::Label;
use vmwe_core::features::ColumnDictionary;
use vmwe_core::ranking::{self, ForestConfig};
use vmwe_core::tuning::{evaluate_fold, fold_assignment, select_best, CvConfig, CvResult, TuningResult};
use vmwe_core::{
    compute_features, Candidate, ClassifierKind, FeatureRanking, FeatureVector, Lexicon, Model,
    RankingMethod,
};

use crate::io;

/// A candidate with its feature vector, one line of a features file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub sent_id: String,
    pub token_ids: Vec<u32>,
    pub type_id: u32,
    pub label: Label,
    pub features: FeatureVector,
}

/// A scored candidate, one line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sent_id: String,
    pub token_ids: Vec<u32>,
    pub type_id: u32,
    pub predicted: bool,
    pub score: f64,
}

/// SHA-256 of the canonical JSON of `value`.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    io::sha256_hex(&serde_json::to_vec(value).expect("fingerprint input serializes"))
}

pub fn featurize(candidates: &[Candidate], lexicon: &Lexicon) -> Result<Vec<FeatureRecord>> {
    candidates
        .par_iter()
        .map(|c| {
            Ok(FeatureRecord {
                sent_id: c.sent_id.clone(),
                token_ids: c.token_ids.clone(),
                type_id: c.type_id,
                label: c.label,
                features: compute_features(c, lexicon)?,
            })
        })
        .collect()
}

pub fn vectors(records: &[FeatureRecord]) -> Vec<FeatureVector> {
    records.iter().map(|r| r.features.clone()).collect()
}

pub fn labels(records: &[FeatureRecord]) -> Result<Vec<bool>> {
    records
        .iter()
        .map(|r| {
            r.label
                .as_bool()
                .with_context(|| format!("unlabeled candidate in sentence '{}'", r.sent_id))
        })
        .collect()
}

/// Per dictionary column, whether the vector carries the column's feature.
pub fn presence(dict: &ColumnDictionary, v: &FeatureVector) -> Vec<bool> {
    dict.columns().iter().map(|c| v.get(&c.feature).is_some()).collect()
}

pub fn rank(
    method: RankingMethod,
    records: &[FeatureRecord],
    seed: u64,
    trees: usize,
    provenance: &str,
) -> Result<FeatureRanking> {
    let vecs = vectors(records);
    let mut r = match method {
        RankingMethod::Freq => ranking::rank_freq(&vecs)?,
        RankingMethod::Gain => ranking::rank_gain(&vecs, &labels(records)?)?,
        RankingMethod::Chi2 | RankingMethod::Forest => {
            let y = labels(records)?;
            let (m, d) = vmwe_core::features::encode(&vecs, None);
            if method == RankingMethod::Chi2 {
                ranking::rank_chi2(&m, &d, &y)?
            } else {
                let cfg = ForestConfig {
                    trees,
                    seed,
                    ..ForestConfig::default()
                };
                ranking::rank_forest(&m, &d, &y, &cfg)?
            }
        }
    };
    r.provenance = provenance.to_string();
    Ok(r)
}

/// [`vmwe_core::tuning::greedy_tune`] with the (k, fold) cells spread over
/// the current rayon pool. Results are gathered in (k, fold) order, so the
/// outcome does not depend on the number of workers.
pub fn greedy_tune_parallel(
    ranking: &FeatureRanking,
    vectors: &[FeatureVector],
    labels: &[bool],
    kind: ClassifierKind,
    config: &CvConfig,
) -> Result<TuningResult> {
    anyhow::ensure!(!ranking.is_empty(), "ranking is empty");
    let features = ranking.features();
    let folds = fold_assignment(vectors.len(), config.folds, config.seed, config.shuffle)?;
    let cells: Vec<(usize, usize)> = (1..=features.len())
        .flat_map(|k| (0..folds.len()).map(move |f| (k, f)))
        .collect();
    let scores = cells
        .par_iter()
        .map(|&(k, f)| evaluate_fold(kind, vectors, labels, &features[..k], f, &folds[f], &config.train))
        .collect::<Result<Vec<_>, _>>()?;
    let per_k: Vec<CvResult> = scores
        .chunks(folds.len())
        .map(|chunk| CvResult::from_folds(chunk.to_vec()))
        .collect();
    Ok(select_best(ranking, kind, config, per_k)?)
}

pub fn predict_records(model: &Model, records: &[FeatureRecord]) -> Result<Vec<Prediction>> {
    records
        .iter()
        .map(|r| model.predict(&r.features).map_err(Into::into))
        .collect()
}
