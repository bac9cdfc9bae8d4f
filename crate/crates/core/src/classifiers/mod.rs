//! Naive Bayes, linear SVM and decision-tree classifiers over binary
//! one-hot columns.
//!
//! All three consume the same [`SparseMatrix`] and produce a [`Model`]
//! whose `score` is positive for the positive class. A training set with a
//! single class yields a constant model instead of an error, since CV folds
//! can be skewed.

pub mod nb;
pub mod svm;
pub mod tree;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{ColumnDictionary, FeatureId, FeatureVector, SparseMatrix};

pub use nb::NaiveBayes;
pub use svm::{LinearSvm, SvmConfig, SvmEpoch};
pub use tree::DecisionTree;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "svm")]
    LinearSvm,
    #[serde(rename = "tree")]
    DecisionTree,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::LinearSvm,
        ClassifierKind::DecisionTree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::LinearSvm => "svm",
            ClassifierKind::DecisionTree => "tree",
        }
    }

    pub fn parse(s: &str) -> Option<ClassifierKind> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::NaiveBayes => "NB",
            ClassifierKind::LinearSvm => "SVM",
            ClassifierKind::DecisionTree => "Tree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default)]
    pub svm: SvmConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ModelParams {
    NaiveBayes(NaiveBayes),
    LinearSvm(LinearSvm),
    DecisionTree(DecisionTree),
    /// Single-class training data.
    Constant { positive: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub version: u32,
    pub kind: ClassifierKind,
    pub n_cols: usize,
    pub params: ModelParams,
    pub dictionary: ColumnDictionary,
    pub selected: Vec<FeatureId>,
    #[serde(default)]
    pub fingerprint: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: bool,
    pub score: f64,
}

fn check_training(matrix: &SparseMatrix, labels: &[bool]) -> Result<()> {
    if matrix.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: matrix.len(),
            right: labels.len(),
        });
    }
    if matrix.is_empty() {
        return Err(Error::Empty("training set".into()));
    }
    for row in &matrix.rows {
        if let Some(&c) = row.iter().find(|&&c| c as usize >= matrix.n_cols) {
            return Err(Error::DictionaryMismatch {
                column: c,
                n_cols: matrix.n_cols,
            });
        }
    }
    Ok(())
}

/// Fits `kind` on an encoded matrix. The returned model has an empty
/// dictionary; see [`train_vectors`] for the version that carries one.
pub fn train(kind: ClassifierKind, matrix: &SparseMatrix, labels: &[bool], config: &TrainConfig) -> Result<Model> {
    check_training(matrix, labels)?;
    let positives = labels.iter().filter(|&&l| l).count();
    let params = if positives == 0 || positives == labels.len() {
        warn!(
            "{kind} training set has a single class ({} examples); using a constant model",
            labels.len()
        );
        ModelParams::Constant {
            positive: positives > 0,
        }
    } else {
        match kind {
            ClassifierKind::NaiveBayes => ModelParams::NaiveBayes(NaiveBayes::fit(matrix, labels)),
            ClassifierKind::LinearSvm => ModelParams::LinearSvm(LinearSvm::fit(matrix, labels, &config.svm).0),
            ClassifierKind::DecisionTree => ModelParams::DecisionTree(DecisionTree::fit(matrix, labels)),
        }
    };
    Ok(Model {
        version: MODEL_VERSION,
        kind,
        n_cols: matrix.n_cols,
        params,
        dictionary: ColumnDictionary::default(),
        selected: Vec::new(),
        fingerprint: String::new(),
    })
}

/// Builds the column dictionary from `vectors` restricted to `selected`,
/// encodes them and fits `kind`.
pub fn train_vectors(
    kind: ClassifierKind,
    vectors: &[FeatureVector],
    labels: &[bool],
    selected: &[FeatureId],
    config: &TrainConfig,
) -> Result<Model> {
    let dictionary = ColumnDictionary::build(vectors, Some(selected));
    let matrix = dictionary.encode(vectors);
    let mut model = train(kind, &matrix, labels, config)?;
    model.dictionary = dictionary;
    model.selected = selected.to_vec();
    Ok(model)
}

impl Model {
    pub fn is_constant(&self) -> bool {
        matches!(self.params, ModelParams::Constant { .. })
    }

    /// Scores a row encoded with this model's dictionary.
    pub fn predict_encoded(&self, row: &[u32]) -> Result<Prediction> {
        if let Some(&c) = row.iter().find(|&&c| c as usize >= self.n_cols) {
            return Err(Error::DictionaryMismatch {
                column: c,
                n_cols: self.n_cols,
            });
        }
        let score = match &self.params {
            ModelParams::NaiveBayes(m) => m.margin(row),
            ModelParams::LinearSvm(m) => m.decision(row),
            ModelParams::DecisionTree(m) => m.score(row),
            ModelParams::Constant { positive } => {
                if *positive {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        Ok(Prediction {
            label: score > 0.0,
            score,
        })
    }

    /// Encodes `v` with the model's dictionary and scores it.
    pub fn predict(&self, v: &FeatureVector) -> Result<Prediction> {
        if self.dictionary.len() != self.n_cols {
            return Err(Error::InvalidArgument(format!(
                "model dictionary has {} columns, parameters expect {}",
                self.dictionary.len(),
                self.n_cols
            )));
        }
        self.predict_encoded(&self.dictionary.encode_one(v))
    }

    pub fn predict_matrix(&self, matrix: &SparseMatrix) -> Result<Vec<Prediction>> {
        if matrix.n_cols != self.n_cols {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} columns, model expects {}",
                matrix.n_cols, self.n_cols
            )));
        }
        matrix.rows.iter().map(|r| self.predict_encoded(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn matrix(rows: &[&[u32]], n_cols: usize) -> SparseMatrix {
        SparseMatrix {
            n_cols,
            rows: rows.iter().map(|r| r.to_vec()).collect(),
        }
    }

    #[test]
    fn single_class_is_constant() {
        let m = matrix(&[&[0], &[]], 1);
        for kind in ClassifierKind::ALL {
            let model = train(kind, &m, &[false, false], &TrainConfig::default()).unwrap();
            assert!(model.is_constant());
            let p = model.predict_encoded(&[0]).unwrap();
            assert!(!p.label);
        }
    }

    #[test]
    fn dictionary_mismatch() {
        let m = matrix(&[&[0], &[]], 1);
        let model = train(ClassifierKind::DecisionTree, &m, &[true, false], &TrainConfig::default()).unwrap();
        assert!(matches!(
            model.predict_encoded(&[3]),
            Err(Error::DictionaryMismatch { column: 3, n_cols: 1 })
        ));
        assert!(train(ClassifierKind::NaiveBayes, &matrix(&[&[2]], 1), &[true], &TrainConfig::default()).is_err());
    }

    #[test]
    fn empty_training_set() {
        let m = SparseMatrix { n_cols: 0, rows: vec![] };
        assert!(matches!(
            train(ClassifierKind::LinearSvm, &m, &[], &TrainConfig::default()),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn kinds_round_trip() {
        for k in ClassifierKind::ALL {
            assert_eq!(ClassifierKind::parse(k.as_str()), Some(k));
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.as_str()));
        }
    }

    #[test]
    fn models_serialize_bit_exactly() {
        let m = matrix(&[&[0, 2], &[1], &[0], &[2], &[1, 2]], 3);
        let y = [true, false, true, false, false];
        for kind in ClassifierKind::ALL {
            let model = train(kind, &m, &y, &TrainConfig::default()).unwrap();
            let json = serde_json::to_string(&model).unwrap();
            let back: Model = serde_json::from_str(&json).unwrap();
            assert_eq!(back, model);
            for row in &m.rows {
                let a = model.predict_encoded(row).unwrap();
                let b = back.predict_encoded(row).unwrap();
                assert_eq!(a.score.to_bits(), b.score.to_bits());
            }
        }
    }
}
