//! Identification of previously seen verbal multiword expressions (VMWEs)
//! in dependency-parsed text.
//!
//! The crate covers the whole algorithmic side of the pipeline and needs
//! only `alloc`:
//!
//! * [`corpus`]: `.cupt` / CoNLL-U sentences, parsing and writing.
//! * [`lexicon`]: attested VMWE types with per-occurrence surface profiles.
//! * [`extraction`]: candidate co-occurrences of attested types.
//! * [`features`]: absolute and relative features and their one-hot encoding.
//! * [`ranking`]: FREQ, CHI2, GAIN and FOREST feature rankings.
//! * [`classifiers`]: Bernoulli naive Bayes, linear SVM and CART.
//! * [`tuning`]: greedy feature-count selection under k-fold CV.
//! * [`evaluation`]: candidate and MWE-level scoring, stratified sampling.
//!
//! File IO, configuration and the command line live in the `vmwe` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cart;
pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod features;
pub mod lexicon;
pub mod metrics;
pub mod profile;
pub mod ranking;
pub mod sampling;
pub mod tree;
pub mod tuning;

pub use crate::classifiers::{ClassifierKind, Model, TrainConfig};
pub use crate::corpus::{parse_cupt, write_cupt, Category, GoldVmwe, Sentence, Token};
pub use crate::error::{Error, Result};
pub use crate::extraction::{extract_candidates, Candidate, ExtractionConfig, Label};
pub use crate::features::{compute_features, FeatureId, FeatureValue, FeatureVector};
pub use crate::lexicon::{build_lexicon, Lexicon, Multiset, VmweType};
pub use crate::profile::Profile;
pub use crate::ranking::{FeatureRanking, RankingMethod};
