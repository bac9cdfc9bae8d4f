//! Pipeline configuration, read from TOML.
//!
//! ```toml
//! train = "fr/train.cupt"
//! test = "fr/test.cupt"          # optional
//! unlabeled = "fr/raw.conllu"    # optional, feeds the FREQ ranking
//! output = "runs/fr"
//! seed = 42
//! folds = 10
//! min_count = 2
//! rankings = ["freq", "chi2", "gain", "forest"]
//! classifiers = ["nb", "svm", "tree"]
//!
//! [extraction]
//! combination_cap = 64
//! max_path = 2
//! insertion_override = 3         # optional
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use vmwe_core::classifiers::SvmConfig;
use vmwe_core::{ClassifierKind, ExtractionConfig, RankingMethod};

/// A configuration or input problem detected before any stage runs.
#[derive(Debug)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ValidationError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionSection {
    #[serde(default = "default_cap")]
    pub combination_cap: usize,
    #[serde(default = "default_path")]
    pub max_path: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insertion_override: Option<usize>,
}

fn default_cap() -> usize {
    ExtractionConfig::default().combination_cap
}

fn default_path() -> u32 {
    ExtractionConfig::default().max_path
}

impl Default for ExtractionSection {
    fn default() -> Self {
        Self {
            combination_cap: default_cap(),
            max_path: default_path(),
            insertion_override: None,
        }
    }
}

impl From<&ExtractionSection> for ExtractionConfig {
    fn from(s: &ExtractionSection) -> Self {
        ExtractionConfig {
            combination_cap: s.combination_cap,
            max_path: s.max_path,
            insertion_override: s.insertion_override,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unlabeled: Option<PathBuf>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Keep corpus order when building folds.
    #[serde(default)]
    pub corpus_order_folds: bool,
    #[serde(default = "default_min_count")]
    pub min_count: usize,
    #[serde(default = "default_rankings")]
    pub rankings: Vec<RankingMethod>,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<ClassifierKind>,
    #[serde(default = "default_trees")]
    pub forest_trees: usize,
    #[serde(default = "default_epochs")]
    pub svm_max_epochs: usize,
    #[serde(default)]
    pub extraction: ExtractionSection,
}

fn default_output() -> PathBuf {
    PathBuf::from("run")
}
fn default_seed() -> u64 {
    42
}
fn default_folds() -> usize {
    10
}
fn default_min_count() -> usize {
    2
}
fn default_rankings() -> Vec<RankingMethod> {
    RankingMethod::ALL.to_vec()
}
fn default_classifiers() -> Vec<ClassifierKind> {
    ClassifierKind::ALL.to_vec()
}
fn default_trees() -> usize {
    10
}
fn default_epochs() -> usize {
    SvmConfig::default().max_epochs
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base: &Path) -> anyhow::Result<PipelineConfig> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        for p in [&mut cfg.train, &mut cfg.test, &mut cfg.unlabeled].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<PipelineConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let Some(train) = &self.train else {
            return Err(invalid("config: 'train' corpus is required"));
        };
        for p in [Some(train), self.test.as_ref(), self.unlabeled.as_ref()].into_iter().flatten() {
            if !p.is_file() {
                return Err(invalid(format!("config: corpus {} does not exist", p.display())));
            }
        }
        if self.folds < 2 {
            return Err(invalid("config: 'folds' must be at least 2"));
        }
        if self.min_count < 1 {
            return Err(invalid("config: 'min_count' must be at least 1"));
        }
        if self.rankings.is_empty() || self.classifiers.is_empty() {
            return Err(invalid("config: 'rankings' and 'classifiers' must not be empty"));
        }
        if self.forest_trees < 1 {
            return Err(invalid("config: 'forest_trees' must be at least 1"));
        }
        Ok(())
    }

    pub fn train_path(&self) -> &Path {
        self.train.as_deref().expect("validated")
    }

    pub fn extraction_config(&self) -> ExtractionConfig {
        (&self.extraction).into()
    }

    pub fn svm_config(&self) -> SvmConfig {
        SvmConfig {
            max_epochs: self.svm_max_epochs,
            seed: self.seed,
            ..SvmConfig::default()
        }
    }
}
