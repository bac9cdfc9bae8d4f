//! Command-line interface: one subcommand per stage plus `run`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use vmwe_core::classifiers::{train_vectors, SvmConfig, TrainConfig};
use vmwe_core::evaluation::{evaluate_candidates, evaluate_mwe, EvalReport, Scope};
use vmwe_core::extraction::{extract_candidates, extraction_report};
use vmwe_core::features::encode;
use vmwe_core::sampling::{sample_external, CorpusPart, StrataConfig};
use vmwe_core::tuning::{CvConfig, TuningResult};
use vmwe_core::{
    build_lexicon, write_cupt, Candidate, ClassifierKind, ExtractionConfig, FeatureId, FeatureRanking, Lexicon,
    Model, RankingMethod,
};

use crate::config::{invalid, PipelineConfig};
use crate::io;
use crate::pipeline;
use crate::report;
use crate::stages::{self, FeatureRecord, PredictionRecord};

#[derive(Parser, Debug)]
#[command(name = "vmwe", version, about = "Identification of previously seen verbal multiword expressions")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the lexicon of attested VMWE types from an annotated corpus.
    Lexicon(LexiconArgs),
    /// Extract candidate occurrences of lexicon types from a corpus.
    Extract(ExtractArgs),
    /// Compute feature vectors of candidates.
    Featurize(FeaturizeArgs),
    /// Rank features with FREQ, CHI2, GAIN or FOREST.
    Rank(RankArgs),
    /// Choose the number of best-ranked features by cross-validation.
    Tune(TuneArgs),
    /// Train a classifier on labeled candidates.
    Train(TrainArgs),
    /// Classify candidates with a trained model.
    Predict(PredictArgs),
    /// Score predictions against gold annotation.
    Evaluate(EvaluateArgs),
    /// Draw a stratified candidate sample from unlabeled corpora.
    Sample(SampleArgs),
    /// Run the whole pipeline from a TOML config.
    Run(RunArgs),
}

#[derive(Args, Debug)]
pub struct LexiconArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub min_count: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractionOpts {
    #[arg(long, default_value_t = 64)]
    pub combination_cap: usize,
    #[arg(long, default_value_t = 2)]
    pub max_path: u32,
    /// Use this insertion bound for every type instead of its observed maximum.
    #[arg(long)]
    pub insertion_override: Option<usize>,
}

impl ExtractionOpts {
    fn config(&self) -> ExtractionConfig {
        ExtractionConfig {
            combination_cap: self.combination_cap,
            max_path: self.max_path,
            insertion_override: self.insertion_override,
        }
    }
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write counts and, for annotated corpora, precision/recall.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub extraction: ExtractionOpts,
}

#[derive(Args, Debug)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the one-hot matrix as TSV.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: RankingMethod,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trees: usize,
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    #[arg(long)]
    pub ranking: PathBuf,
    /// Features file, or a candidates file together with --lexicon.
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_parser = parse_classifier)]
    pub classifier: ClassifierKind,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Slice folds in corpus order instead of shuffling.
    #[arg(long)]
    pub corpus_order: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_parser = parse_classifier)]
    pub classifier: Option<ClassifierKind>,
    /// Take the classifier and feature set from a tuning result.
    #[arg(long)]
    pub tuning: Option<PathBuf>,
    /// Use the top `k` features of this ranking.
    #[arg(long, requires = "k")]
    pub ranking: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Corpus the candidates come from; with --cupt, writes system output.
    #[arg(long, requires = "cupt")]
    pub corpus: Option<PathBuf>,
    #[arg(long, requires = "corpus")]
    pub cupt: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Gold `.cupt` corpus (MWE level).
    #[arg(long, requires_all = ["pred", "lexicon"])]
    pub gold: Option<PathBuf>,
    /// System `.cupt` output (MWE level).
    #[arg(long)]
    pub pred: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// all, seen, variant, category (every category) or one of VID/LVC/IRV/MVC.
    #[arg(long, default_value = "seen")]
    pub scope: String,
    /// Predictions file (candidate level), scored against --features labels.
    #[arg(long, requires = "features", conflicts_with = "gold")]
    pub predictions: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// TOML file with `seed` and `[[strata]]` tables.
    #[arg(long)]
    pub strata: PathBuf,
    /// Corpus part as NAME=PATH; repeatable.
    #[arg(long = "part", required = true)]
    pub parts: Vec<String>,
    #[arg(long)]
    pub cap: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub extraction: ExtractionOpts,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_method(s: &str) -> std::result::Result<RankingMethod, String> {
    RankingMethod::parse(s).ok_or_else(|| format!("unknown ranking method '{s}' (freq, chi2, gain, forest)"))
}

fn parse_classifier(s: &str) -> std::result::Result<ClassifierKind, String> {
    ClassifierKind::parse(s).ok_or_else(|| format!("unknown classifier '{s}' (nb, svm, tree)"))
}

fn require(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(format!("input file {} does not exist", path.display())))
    }
}

/// Fingerprint of a stage invocation: its name, parameters and the
/// contents of its inputs.
fn stage_fingerprint(command: &str, inputs: &[&Path], params: serde_json::Value) -> Result<String> {
    let mut hashes = Vec::new();
    for p in inputs {
        require(p)?;
        hashes.push(io::file_sha256(p)?);
    }
    Ok(stages::fingerprint(&json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": hashes,
        "params": params,
    })))
}

fn load_lexicon(path: &Path) -> Result<Lexicon> {
    Ok(io::read_json::<Lexicon>(path, "lexicon")?.data)
}

/// Feature records from a features file, or computed from a candidates
/// file when a lexicon is given.
fn load_records(path: &Path, lexicon: Option<&Path>) -> Result<Vec<FeatureRecord>> {
    let (_, values): (_, Vec<serde_json::Value>) = io::read_jsonl(path)?;
    let has_features = values.first().is_none_or(|v| v.get("features").is_some());
    if has_features {
        return values
            .into_iter()
            .map(|v| serde_json::from_value(v).map_err(Into::into))
            .collect::<Result<Vec<FeatureRecord>>>()
            .with_context(|| format!("{} is not a features file", path.display()));
    }
    let Some(lex_path) = lexicon else {
        return Err(invalid(format!(
            "{} holds candidates without features; pass --lexicon",
            path.display()
        )));
    };
    let lex = load_lexicon(lex_path)?;
    let cands = values
        .into_iter()
        .map(serde_json::from_value)
        .collect::<std::result::Result<Vec<Candidate>, _>>()?;
    stages::featurize(&cands, &lex)
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Lexicon(a) => cmd_lexicon(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Featurize(a) => cmd_featurize(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Run(a) => cmd_run(a),
    }
}

fn cmd_lexicon(a: LexiconArgs) -> Result<()> {
    if a.min_count < 1 {
        return Err(invalid("--min-count must be at least 1"));
    }
    let fp = stage_fingerprint("lexicon", &[&a.train], json!({ "min_count": a.min_count }))?;
    let train = io::read_cupt(&a.train)?;
    let lex = build_lexicon(&train, a.min_count);
    let st = lex.stats();
    info!(
        "{} gold VMWEs, {} types of which {} kept ({} occurrences)",
        st.gold_vmwes, st.types_total, st.types_retained, st.occurrences_retained
    );
    io::write_json(&a.out, "lexicon", &fp, &lex)
}

fn cmd_extract(a: ExtractArgs) -> Result<()> {
    let fp = stage_fingerprint("extract", &[&a.lexicon, &a.corpus], json!(a.extraction))?;
    let lex = load_lexicon(&a.lexicon)?;
    let corpus = io::read_cupt(&a.corpus)?;
    let (cands, stats) = extract_candidates(&corpus, &lex, &a.extraction.config());
    let labeled = corpus.iter().any(|s| s.is_annotated());
    let report = if labeled {
        Some(extraction_report(&cands, &corpus, &lex)?)
    } else {
        None
    };
    match &report {
        Some(r) => println!(
            "candidates {}  positive {}  negative {}  precision {:.4}  recall {:.4}",
            r.candidates, r.positive, r.negative, r.precision, r.recall
        ),
        None => println!("candidates {} (unlabeled corpus)", cands.len()),
    }
    io::write_jsonl(&a.out, "candidates", &fp, &cands)?;
    if let Some(p) = &a.report {
        io::write_json(p, "extraction", &fp, &json!({ "stats": stats, "report": report }))?;
    }
    Ok(())
}

fn cmd_featurize(a: FeaturizeArgs) -> Result<()> {
    let fp = stage_fingerprint("featurize", &[&a.lexicon, &a.candidates], json!({}))?;
    let records = load_records(&a.candidates, Some(&a.lexicon))?;
    io::write_jsonl(&a.out, "features", &fp, &records)?;
    if let Some(tsv) = &a.tsv {
        let vecs = stages::vectors(&records);
        let (m, d) = encode(&vecs, None);
        let present: Vec<Vec<bool>> = vecs.iter().map(|v| stages::presence(&d, v)).collect();
        let labels: Vec<Option<bool>> = records.iter().map(|r| r.label.as_bool()).collect();
        io::write_matrix_tsv(tsv, &fp, &d, &m, &present, &labels)?;
    }
    Ok(())
}

fn cmd_rank(a: RankArgs) -> Result<()> {
    if a.trees < 1 {
        return Err(invalid("--trees must be at least 1"));
    }
    let fp = stage_fingerprint(
        "rank",
        &[&a.features],
        json!({ "method": a.method, "seed": a.seed, "trees": a.trees }),
    )?;
    let records = load_records(&a.features, None)?;
    let r = stages::rank(a.method, &records, a.seed, a.trees, &fp)?;
    println!("{}", vmwe_core::ranking::describe(&r, 10));
    io::write_json(&a.out, "ranking", &fp, &r)
}

fn cmd_tune(a: TuneArgs) -> Result<()> {
    if a.folds < 2 {
        return Err(invalid("--folds must be at least 2"));
    }
    let mut inputs: Vec<&Path> = vec![&a.ranking, &a.candidates];
    inputs.extend(a.lexicon.as_deref());
    let fp = stage_fingerprint(
        "tune",
        &inputs,
        json!({ "classifier": a.classifier, "folds": a.folds, "seed": a.seed, "corpus_order": a.corpus_order }),
    )?;
    let ranking = io::read_json::<FeatureRanking>(&a.ranking, "ranking")?.data;
    let records = load_records(&a.candidates, a.lexicon.as_deref())?;
    let cfg = CvConfig {
        folds: a.folds,
        seed: a.seed,
        shuffle: !a.corpus_order,
        train: TrainConfig {
            svm: SvmConfig {
                seed: a.seed,
                ..SvmConfig::default()
            },
        },
    };
    let t = stages::greedy_tune_parallel(&ranking, &stages::vectors(&records), &stages::labels(&records)?, a.classifier, &cfg)?;
    print!("{}", report::summary_table(std::slice::from_ref(&t), None));
    io::write_json(&a.out, "tuning", &fp, &t)
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut inputs: Vec<&Path> = vec![&a.candidates];
    inputs.extend(a.lexicon.as_deref());
    inputs.extend(a.tuning.as_deref());
    inputs.extend(a.ranking.as_deref());
    let fp = stage_fingerprint(
        "train",
        &inputs,
        json!({ "classifier": a.classifier, "k": a.k, "seed": a.seed }),
    )?;
    let records = load_records(&a.candidates, a.lexicon.as_deref())?;
    let vectors = stages::vectors(&records);
    let (kind, selected): (ClassifierKind, Vec<FeatureId>) = match (&a.tuning, &a.ranking) {
        (Some(t), _) => {
            let t = io::read_json::<TuningResult>(t, "tuning")?.data;
            (a.classifier.unwrap_or(t.classifier), t.selected_features)
        }
        (None, Some(r)) => {
            let r = io::read_json::<FeatureRanking>(r, "ranking")?.data;
            let k = a.k.expect("clap enforces --k");
            if k == 0 || k > r.len() {
                return Err(invalid(format!("--k must be in 1..={}", r.len())));
            }
            (a.classifier.ok_or_else(|| invalid("--classifier is required"))?, r.top(k))
        }
        (None, None) => {
            let all: BTreeSet<FeatureId> = vectors.iter().flat_map(|v| v.values.keys().cloned()).collect();
            (a.classifier.ok_or_else(|| invalid("--classifier is required"))?, all.into_iter().collect())
        }
    };
    let cfg = TrainConfig {
        svm: SvmConfig {
            seed: a.seed,
            ..SvmConfig::default()
        },
    };
    let mut model = train_vectors(kind, &vectors, &stages::labels(&records)?, &selected, &cfg)?;
    model.fingerprint = fp.clone();
    info!("{kind} trained on {} candidates, {} columns", records.len(), model.n_cols);
    io::write_json(&a.out, "model", &fp, &model)
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let mut inputs: Vec<&Path> = vec![&a.model, &a.candidates];
    inputs.extend(a.lexicon.as_deref());
    inputs.extend(a.corpus.as_deref());
    let fp = stage_fingerprint("predict", &inputs, json!({}))?;
    let model = io::read_json::<Model>(&a.model, "model")?.data;
    let records = load_records(&a.candidates, a.lexicon.as_deref())?;
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
    println!(
        "{} of {} candidates predicted positive",
        rows.iter().filter(|r| r.predicted).count(),
        rows.len()
    );
    io::write_jsonl(&a.out, "predictions", &fp, &rows)?;
    if let (Some(corpus), Some(cupt)) = (&a.corpus, &a.cupt) {
        let lex_path = a
            .lexicon
            .as_deref()
            .ok_or_else(|| invalid("--lexicon is required to label system output"))?;
        let lex = load_lexicon(lex_path)?;
        let sentences = io::read_cupt(corpus)?;
        let vmwes: Vec<_> = rows
            .iter()
            .filter(|r| r.predicted)
            .map(|r| {
                let cat = lex.get(r.type_id).map_or("VID", |t| t.category.as_str());
                vmwe_core::corpus::PredictedVmwe {
                    sent_id: r.sent_id.clone(),
                    token_ids: r.token_ids.clone(),
                    category: cat.to_string(),
                    score: r.score,
                }
            })
            .collect();
        let text = format!("# vmwe.fingerprint = {fp}\n{}", write_cupt(&sentences, Some(&vmwes))?);
        io::write_text(cupt, &text)?;
    }
    Ok(())
}

fn parse_scopes(s: &str) -> Result<Vec<Scope>> {
    match s.to_ascii_lowercase().as_str() {
        "category" => Ok(Scope::standard().into_iter().filter(|s| matches!(s, Scope::Category(_))).collect()),
        "standard" | "every" => Ok(Scope::standard()),
        other => Scope::parse(other)
            .map(|s| vec![s])
            .ok_or_else(|| invalid(format!("unknown scope '{s}'"))),
    }
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let reports: Vec<EvalReport>;
    let fp;
    if let (Some(gold), Some(pred), Some(lex)) = (&a.gold, &a.pred, &a.lexicon) {
        let scopes = parse_scopes(&a.scope)?;
        fp = stage_fingerprint("evaluate", &[gold, pred, lex], json!({ "scope": a.scope }))?;
        let lexicon = load_lexicon(lex)?;
        let gold_corpus = io::read_cupt(gold)?;
        let system = io::read_cupt(pred)?;
        let predictions: Vec<vmwe_core::corpus::PredictedVmwe> = system
            .iter()
            .flat_map(|s| {
                s.gold.iter().map(|g| vmwe_core::corpus::PredictedVmwe {
                    sent_id: s.sent_id.clone(),
                    token_ids: g.token_ids.clone(),
                    category: g.raw_category.clone(),
                    score: 0.0,
                })
            })
            .collect();
        reports = scopes
            .into_iter()
            .map(|s| evaluate_mwe(&predictions, &gold_corpus, &lexicon, s))
            .collect::<std::result::Result<_, _>>()?;
    } else if let (Some(p), Some(f)) = (&a.predictions, &a.features) {
        fp = stage_fingerprint("evaluate", &[p, f], json!({}))?;
        let (_, preds): (_, Vec<PredictionRecord>) = io::read_jsonl(p)?;
        let records = load_records(f, a.lexicon.as_deref())?;
        let aligned = preds.len() == records.len()
            && preds
                .iter()
                .zip(&records)
                .all(|(x, r)| x.sent_id == r.sent_id && x.token_ids == r.token_ids && x.type_id == r.type_id);
        if !aligned {
            return Err(invalid(format!(
                "{} and {} do not list the same candidates",
                p.display(),
                f.display()
            )));
        }
        let predicted: Vec<bool> = preds.iter().map(|r| r.predicted).collect();
        reports = vec![evaluate_candidates(&predicted, &stages::labels(&records)?)?];
    } else {
        return Err(invalid(
            "evaluate needs --gold/--pred/--lexicon or --predictions/--features",
        ));
    }
    print!("{}", report::eval_table(&reports));
    if let Some(out) = &a.out {
        io::write_json(out, "evaluation", &fp, &reports)?;
    }
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let mut parts = Vec::new();
    for spec in &a.parts {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| invalid(format!("--part '{spec}' is not NAME=PATH")))?;
        parts.push((name.to_string(), PathBuf::from(path)));
    }
    let strata_text = std::fs::read_to_string(&a.strata)
        .map_err(|e| invalid(format!("cannot read {}: {e}", a.strata.display())))?;
    let strata: StrataConfig =
        toml::from_str(&strata_text).map_err(|e| invalid(format!("{}: {e}", a.strata.display())))?;
    let mut inputs: Vec<&Path> = vec![&a.lexicon, &a.strata];
    inputs.extend(parts.iter().map(|(_, p)| p.as_path()));
    let names: Vec<&str> = parts.iter().map(|(n, _)| n.as_str()).collect();
    let fp = stage_fingerprint(
        "sample",
        &inputs,
        json!({ "cap": a.cap, "parts": names, "extraction": a.extraction }),
    )?;
    let lex = load_lexicon(&a.lexicon)?;
    let corpora = parts
        .iter()
        .map(|(_, p)| io::read_cupt(p))
        .collect::<Result<Vec<_>>>()?;
    let corpus_parts: Vec<CorpusPart> = parts
        .iter()
        .zip(&corpora)
        .map(|((name, _), s)| CorpusPart { name, sentences: s })
        .collect();
    let sample = sample_external(&lex, &corpus_parts, &strata, a.cap, &a.extraction.config());
    for w in &sample.warnings {
        warn!("{w}");
    }
    println!(
        "{} types, {} candidates ({} per part)",
        sample.types.len(),
        sample.items.len(),
        sample.per_part
    );
    io::write_jsonl(&a.out, "sample", &fp, &sample.items)?;
    let types_path = a.out.with_extension("types.json");
    io::write_json(&types_path, "sample-types", &fp, &json!({ "types": sample.types, "warnings": sample.warnings }))
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut cfg = PipelineConfig::load(&a.config)?;
    if let Some(out) = a.out {
        cfg.output = out;
    }
    let (dir, summary) = pipeline::run_pipeline(&cfg)?;
    print!("{}", report::summary_table(&summary.cells, Some(summary.winner)));
    if !summary.evaluation.is_empty() {
        print!("{}", report::eval_table(&summary.evaluation));
    }
    println!("run directory: {}", dir.display());
    Ok(())
}
