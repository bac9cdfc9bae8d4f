//! Candidate-level and MWE-level scoring.
//!
//! MWE-level scoring matches predictions to gold VMWEs by exact
//! (sentence, token set) equality. A scope restricts both sides with the
//! same predicate, so unmatched predictions outside the scope are not false
//! positives there.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::classifiers::Prediction;
use crate::corpus::{Category, PredictedVmwe, Sentence};
use crate::error::{Error, Result};
use crate::extraction::Candidate;
use crate::lexicon::Lexicon;
use crate::metrics::Counts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Candidate,
    Mwe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    /// Lemma multiset annotated at least once in training.
    Seen,
    /// Seen, with a component form sequence never observed in training.
    Variant,
    /// Seen and of one category.
    Category(Category),
}

impl Scope {
    pub fn parse(s: &str) -> Option<Scope> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Some(Scope::All),
            "seen" => Some(Scope::Seen),
            "variant" => Some(Scope::Variant),
            other => Category::ALL
                .into_iter()
                .find(|c| c.as_str().eq_ignore_ascii_case(other))
                .map(Scope::Category),
        }
    }

    /// The scopes of a full report, categories last.
    pub fn standard() -> Vec<Scope> {
        let mut v = alloc::vec![Scope::All, Scope::Seen, Scope::Variant];
        v.extend(
            [Category::Vid, Category::Lvc, Category::Irv, Category::Mvc]
                .into_iter()
                .map(Scope::Category),
        );
        v
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Seen => f.write_str("seen"),
            Scope::Variant => f.write_str("variant"),
            Scope::Category(c) => write!(f, "seen/{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub granularity: Granularity,
    pub scope: Scope,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub counts: Counts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EvalReport {
    fn new(granularity: Granularity, scope: Scope, counts: Counts, notes: Vec<String>) -> EvalReport {
        EvalReport {
            granularity,
            scope,
            precision: counts.precision(),
            recall: counts.recall(),
            f: counts.f1(),
            counts,
            notes,
        }
    }
}

/// Binary P/R/F of the positive class over candidate records.
pub fn evaluate_candidates(predicted: &[bool], gold: &[bool]) -> Result<EvalReport> {
    let counts = Counts::from_labels(predicted, gold)?;
    Ok(EvalReport::new(Granularity::Candidate, Scope::All, counts, Vec::new()))
}

/// The positively classified candidates as VMWE predictions, labeled with
/// their type's category.
pub fn predicted_vmwes(candidates: &[Candidate], predictions: &[Prediction], lexicon: &Lexicon) -> Result<Vec<PredictedVmwe>> {
    if candidates.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: candidates.len(),
            right: predictions.len(),
        });
    }
    let mut out = Vec::new();
    for (c, p) in candidates.iter().zip(predictions) {
        if !p.label {
            continue;
        }
        let ty = lexicon.get(c.type_id).ok_or(Error::NoOccurrences { type_id: c.type_id })?;
        out.push(PredictedVmwe {
            sent_id: c.sent_id.clone(),
            token_ids: c.token_ids.clone(),
            category: ty.category.as_str().to_string(),
            score: p.score,
        });
    }
    Ok(out)
}

struct Scoper<'a> {
    lexicon: &'a Lexicon,
    scope: Scope,
}

impl Scoper<'_> {
    fn contains(&self, sentence: &Sentence, ids: &[u32], category: Category) -> bool {
        if self.scope == Scope::All {
            return true;
        }
        let Some(entry) = self.lexicon.seen_entry(&sentence.lemmas_of(ids)) else {
            return false;
        };
        match self.scope {
            Scope::All | Scope::Seen => true,
            Scope::Variant => !entry.surfaces.contains(&sentence.surface_of(ids)),
            Scope::Category(c) => c == category,
        }
    }
}

fn normalized(ids: &[u32]) -> Vec<u32> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Scores predictions against the gold VMWEs of `gold` within `scope`.
/// Gold VMWEs that no prediction matches are false negatives, whether or
/// not a candidate was ever extracted for them.
pub fn evaluate_mwe(predictions: &[PredictedVmwe], gold: &[Sentence], lexicon: &Lexicon, scope: Scope) -> Result<EvalReport> {
    if !gold.iter().any(Sentence::is_annotated) {
        return Err(Error::Unlabeled("gold corpus has no VMWE annotation".into()));
    }
    let mut by_id: BTreeMap<&str, &Sentence> = BTreeMap::new();
    for s in gold {
        by_id.entry(s.sent_id.as_str()).or_insert(s);
    }
    let scoper = Scoper { lexicon, scope };
    let mut notes = Vec::new();

    let mut predicted: BTreeMap<(&str, Vec<u32>), Category> = BTreeMap::new();
    let mut duplicates = 0;
    for p in predictions {
        let sentence = by_id.get(p.sent_id.as_str()).ok_or_else(|| Error::UnknownReference {
            sent_id: p.sent_id.clone(),
            message: "prediction refers to an unknown sentence".into(),
        })?;
        let ids = normalized(&p.token_ids);
        if let Some(&bad) = ids.iter().find(|&&id| sentence.token(id).is_none()) {
            return Err(Error::UnknownReference {
                sent_id: p.sent_id.clone(),
                message: format!("prediction refers to unknown token {bad}"),
            });
        }
        if predicted
            .insert((sentence.sent_id.as_str(), ids), Category::from_label(&p.category))
            .is_some()
        {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        notes.push(format!("{duplicates} duplicate predictions counted once"));
    }

    let mut counts = Counts::default();
    let mut matched: BTreeSet<(&str, Vec<u32>)> = BTreeSet::new();
    for s in gold {
        if by_id.get(s.sent_id.as_str()).is_none_or(|first| !core::ptr::eq(*first, s)) {
            continue;
        }
        for g in &s.gold {
            if !scoper.contains(s, &g.token_ids, g.category) {
                continue;
            }
            let key = (s.sent_id.as_str(), g.token_ids.clone());
            if predicted.contains_key(&key) {
                counts.tp += 1;
                matched.insert(key);
            } else {
                counts.fn_ += 1;
            }
        }
    }
    for ((sent_id, ids), &category) in &predicted {
        if matched.contains(&(*sent_id, ids.clone())) {
            continue;
        }
        let sentence = by_id[sent_id];
        let gold_match = sentence.gold.iter().any(|g| &g.token_ids == ids);
        // A prediction equal to an out-of-scope gold VMWE is neither a hit
        // nor a false alarm for this scope.
        if !gold_match && scoper.contains(sentence, ids, category) {
            counts.fp += 1;
        }
    }
    Ok(EvalReport::new(Granularity::Mwe, scope, counts, notes))
}
