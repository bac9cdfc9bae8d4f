//! End-to-end run: lexicon, extraction, features, rankings, tuning, final
//! model, prediction and evaluation, all written to one run directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use log::info;
use serde::Serialize;

use vmwe_core::classifiers::{train_vectors, TrainConfig};
use vmwe_core::evaluation::{evaluate_mwe, predicted_vmwes, EvalReport, Scope};
use vmwe_core::extraction::{extract_candidates, extraction_report};
use vmwe_core::features::encode;
use vmwe_core::tuning::{CvConfig, TuningResult};
use vmwe_core::{build_lexicon, write_cupt, Candidate, Lexicon, Sentence};

use crate::config::PipelineConfig;
use crate::io;
use crate::report;
use crate::stages::{self, FeatureRecord, PredictionRecord};

#[derive(Serialize)]
struct FingerprintInput<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a PipelineConfig,
    train_sha256: String,
    test_sha256: Option<String>,
    unlabeled_sha256: Option<String>,
}

/// Fingerprint of a configuration and the contents of its corpora. The
/// output directory and corpus locations do not enter it.
pub fn config_fingerprint(config: &PipelineConfig) -> Result<String> {
    let hash = |p: &Option<PathBuf>| p.as_deref().map(io::file_sha256).transpose();
    let mut portable = config.clone();
    portable.output = PathBuf::new();
    for p in [&mut portable.train, &mut portable.test, &mut portable.unlabeled]
        .into_iter()
        .flatten()
    {
        *p = p.file_name().map(PathBuf::from).unwrap_or_default();
    }
    let input = FingerprintInput {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &portable,
        train_sha256: io::file_sha256(config.train_path())?,
        test_sha256: hash(&config.test)?,
        unlabeled_sha256: hash(&config.unlabeled)?,
    };
    Ok(stages::fingerprint(&input))
}

fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    info!("stage {name}: start");
    let out = f().with_context(|| format!("stage '{name}' failed"))?;
    info!("stage {name}: done in {:.2?}", start.elapsed());
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub fingerprint: String,
    pub cells: Vec<TuningResult>,
    /// Index into `cells` of the configuration used for the final model.
    pub winner: usize,
    pub evaluation: Vec<EvalReport>,
}

fn extract_with_report(
    name: &str,
    out: &Path,
    fp: &str,
    corpus: &[Sentence],
    lexicon: &Lexicon,
    config: &PipelineConfig,
    labeled: bool,
) -> Result<Vec<Candidate>> {
    let (cands, stats) = extract_candidates(corpus, lexicon, &config.extraction_config());
    info!("{name}: {} candidates from {} sentences", cands.len(), stats.sentences);
    io::write_jsonl(&out.join(format!("{name}.candidates.jsonl")), "candidates", fp, &cands)?;
    let report = if labeled {
        Some(extraction_report(&cands, corpus, lexicon)?)
    } else {
        None
    };
    io::write_json(
        &out.join(format!("{name}.extraction.json")),
        "extraction",
        fp,
        &serde_json::json!({ "stats": stats, "report": report }),
    )?;
    Ok(cands)
}

fn write_features(out: &Path, name: &str, fp: &str, records: &[FeatureRecord]) -> Result<()> {
    io::write_jsonl(&out.join(format!("{name}.features.jsonl")), "features", fp, records)?;
    let vecs = stages::vectors(records);
    let (matrix, dict) = encode(&vecs, None);
    let present: Vec<Vec<bool>> = vecs.iter().map(|v| stages::presence(&dict, v)).collect();
    let labels: Vec<Option<bool>> = records.iter().map(|r| r.label.as_bool()).collect();
    io::write_matrix_tsv(&out.join(format!("{name}.matrix.tsv")), fp, &dict, &matrix, &present, &labels)
}

/// Runs every stage and returns the run directory. Artifacts written
/// before a failing stage are kept.
pub fn run_pipeline(config: &PipelineConfig) -> Result<(PathBuf, RunSummary)> {
    config.validate()?;
    let out = config.output.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let fp = config_fingerprint(config)?;
    info!("run fingerprint {fp}");
    io::write_json(&out.join("config.json"), "config", &fp, config)?;

    let train = stage("read", || io::read_cupt(config.train_path()))?;
    let lexicon = stage("lexicon", || {
        let lex = build_lexicon(&train, config.min_count);
        io::write_json(&out.join("lexicon.json"), "lexicon", &fp, &lex)?;
        Ok(lex)
    })?;

    let train_cands = stage("extract", || {
        extract_with_report("train", &out, &fp, &train, &lexicon, config, true)
    })?;
    let train_records = stage("featurize", || {
        let r = stages::featurize(&train_cands, &lexicon)?;
        write_features(&out, "train", &fp, &r)?;
        Ok(r)
    })?;

    let unlabeled_records = match &config.unlabeled {
        Some(path) => Some(stage("unlabeled", || {
            let corpus = io::read_cupt(path)?;
            let cands = extract_with_report("unlabeled", &out, &fp, &corpus, &lexicon, config, false)?;
            let r = stages::featurize(&cands, &lexicon)?;
            io::write_jsonl(&out.join("unlabeled.features.jsonl"), "features", &fp, &r)?;
            Ok(r)
        })?),
        None => None,
    };

    let rankings = stage("rank", || {
        config
            .rankings
            .iter()
            .map(|&m| {
                let source = match (m, &unlabeled_records) {
                    (vmwe_core::RankingMethod::Freq, Some(u)) => u,
                    _ => &train_records,
                };
                let r = stages::rank(m, source, config.seed, config.forest_trees, &fp)
                    .with_context(|| format!("{m} ranking"))?;
                io::write_json(&out.join(format!("rankings/{}.json", m.as_str())), "ranking", &fp, &r)?;
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let vectors = stages::vectors(&train_records);
    let labels = stages::labels(&train_records)?;
    let cv = CvConfig {
        folds: config.folds,
        seed: config.seed,
        shuffle: !config.corpus_order_folds,
        train: TrainConfig {
            svm: config.svm_config(),
        },
    };
    let cells = stage("tune", || {
        let mut cells = Vec::new();
        for ranking in &rankings {
            for &kind in &config.classifiers {
                let t = stages::greedy_tune_parallel(ranking, &vectors, &labels, kind, &cv)
                    .with_context(|| format!("{} + {kind}", ranking.method))?;
                info!(
                    "{} + {kind}: k={} F={:.3} sigma={:.3}",
                    ranking.method, t.best_k, t.mean_f, t.sigma
                );
                io::write_json(
                    &out.join(format!("tuning/{}-{}.json", ranking.method.as_str(), kind.as_str())),
                    "tuning",
                    &fp,
                    &t,
                )?;
                cells.push(t);
            }
        }
        Ok(cells)
    })?;
    let winner = (0..cells.len())
        .reduce(|best, i| if cells[i].mean_f > cells[best].mean_f { i } else { best })
        .expect("at least one cell");
    let table = report::summary_table(&cells, Some(winner));
    io::write_text(&out.join("summary.txt"), &format!("# fingerprint={fp}\n{table}"))?;
    io::write_text(&out.join("summary.tsv"), &report::summary_tsv(&fp, &cells))?;

    let best = &cells[winner];
    let model = stage("train", || {
        let mut m = train_vectors(best.classifier, &vectors, &labels, &best.selected_features, &cv.train)?;
        m.fingerprint = fp.clone();
        io::write_json(&out.join("model.json"), "model", &fp, &m)?;
        Ok(m)
    })?;

    let mut evaluation = Vec::new();
    if let Some(test_path) = &config.test {
        let test = stage("read", || io::read_cupt(test_path))?;
        let predictions = stage("predict", || {
            let cands = extract_with_report("test", &out, &fp, &test, &lexicon, config, true)?;
            let records = stages::featurize(&cands, &lexicon)?;
            io::write_jsonl(&out.join("test.features.jsonl"), "features", &fp, &records)?;
            let preds = stages::predict_records(&model, &records)?;
            let rows: Vec<PredictionRecord> = records
                .iter()
                .zip(&preds)
                .map(|(r, p)| PredictionRecord {
                    sent_id: r.sent_id.clone(),
                    token_ids: r.token_ids.clone(),
                    type_id: r.type_id,
                    predicted: p.label,
                    score: p.score,
                })
                .collect();
            io::write_jsonl(&out.join("test.predictions.jsonl"), "predictions", &fp, &rows)?;
            let vmwes = predicted_vmwes(&cands, &preds, &lexicon)?;
            let mut text = format!("# vmwe.fingerprint = {fp}\n");
            text.push_str(&write_cupt(&test, Some(&vmwes))?);
            io::write_text(&out.join("system.cupt"), &text)?;
            Ok(vmwes)
        })?;
        evaluation = stage("evaluate", || {
            let reports = Scope::standard()
                .into_iter()
                .map(|s| evaluate_mwe(&predictions, &test, &lexicon, s))
                .collect::<Result<Vec<_>, _>>()?;
            io::write_json(&out.join("evaluation.json"), "evaluation", &fp, &reports)?;
            io::write_text(
                &out.join("evaluation.txt"),
                &format!("# fingerprint={fp}\n{}", report::eval_table(&reports)),
            )?;
            Ok(reports)
        })?;
    }

    let summary = RunSummary {
        fingerprint: fp,
        cells,
        winner,
        evaluation,
    };
    Ok((out, summary))
}
