//! Candidate extraction: every co-occurrence of an attested type's
//! components that passes the multiset, connectivity and insertion rules.
//!
//! Within a sentence and type, surviving combinations compete for tokens:
//! smallest linear span first, then further non-overlapping matches. A
//! combination that exactly covers a gold VMWE is always kept.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, Token};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, Multiset, VmweType};
use crate::profile::Profile;
use crate::tree::DepTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
    Unknown,
}

impl Label {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Label::Positive => Some(true),
            Label::Negative => Some(false),
            Label::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub sent_id: String,
    /// Sorted component token ids.
    pub token_ids: Vec<u32>,
    pub type_id: u32,
    pub label: Label,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Combinations kept per type and sentence, smallest span first.
    pub combination_cap: usize,
    /// Longest dependency path allowed by the connectivity rule.
    pub max_path: u32,
    /// Replaces every type's observed insertion maximum when set.
    pub insertion_override: Option<usize>,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            combination_cap: 64,
            max_path: 2,
            insertion_override: None,
        }
    }
}

/// Upper bound on raw combinations enumerated per type and sentence.
const ENUMERATION_LIMIT: usize = 4096;

/// Per-rule counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStats {
    pub sentences: usize,
    pub skipped_unparsed: usize,
    /// Combinations satisfying the multiset rule.
    pub matched: usize,
    pub dropped_cap: usize,
    pub dropped_connectivity: usize,
    pub dropped_insertion: usize,
    pub dropped_overlap: usize,
    pub emitted: usize,
}

impl ExtractionStats {
    pub fn merge(&mut self, other: &ExtractionStats) {
        self.sentences += other.sentences;
        self.skipped_unparsed += other.skipped_unparsed;
        self.matched += other.matched;
        self.dropped_cap += other.dropped_cap;
        self.dropped_connectivity += other.dropped_connectivity;
        self.dropped_insertion += other.dropped_insertion;
        self.dropped_overlap += other.dropped_overlap;
        self.emitted += other.emitted;
    }
}

fn is_verb(upos: &str) -> bool {
    upos == "VERB" || upos == "AUX"
}

fn is_noun(upos: &str) -> bool {
    upos == "NOUN"
}

fn is_function_word(upos: &str) -> bool {
    matches!(
        upos,
        "DET" | "ADP" | "PRON" | "CCONJ" | "SCONJ" | "PART" | "PUNCT"
    )
}

/// The token pair the connectivity rule constrains, if any: both tokens of
/// a two-component combination, or its single verb and single noun when all
/// other components are function words.
pub fn constrained_pair(tokens: &[&Token]) -> Option<(u32, u32)> {
    if tokens.len() == 2 {
        return Some((tokens[0].id, tokens[1].id));
    }
    if tokens.len() < 2 {
        return None;
    }
    let verbs: Vec<&&Token> = tokens.iter().filter(|t| is_verb(&t.upos)).collect();
    let nouns: Vec<&&Token> = tokens.iter().filter(|t| is_noun(&t.upos)).collect();
    if verbs.len() != 1 || nouns.len() != 1 {
        return None;
    }
    let rest_are_function = tokens
        .iter()
        .filter(|t| !is_verb(&t.upos) && !is_noun(&t.upos))
        .all(|t| is_function_word(&t.upos));
    rest_are_function.then(|| (verbs[0].id, nouns[0].id))
}

/// Uncapped number of tokens strictly between the extreme components.
pub fn insert_count(sorted_ids: &[u32]) -> usize {
    match (sorted_ids.first(), sorted_ids.last()) {
        (Some(&lo), Some(&hi)) => (hi - lo + 1) as usize - sorted_ids.len(),
        _ => 0,
    }
}

/// Enumerates token combinations whose lemma and UPOS multisets equal the
/// type's, ids ascending.
fn enumerate(sentence: &Sentence, ty: &VmweType) -> Vec<Vec<u32>> {
    let pool: Vec<&Token> = sentence
        .tokens
        .iter()
        .filter(|t| ty.lemmas.contains(&t.lemma) && ty.pos.contains(&t.upos))
        .collect();
    let lemma_need: Vec<(&str, usize)> = ty.lemmas.counts();
    let pos_need: Vec<(&str, usize)> = ty.pos.counts();
    if pool.len() < ty.arity() {
        return Vec::new();
    }

    struct Search<'a> {
        pool: &'a [&'a Token],
        lemma_left: Vec<(&'a str, usize)>,
        pos_left: Vec<(&'a str, usize)>,
        chosen: Vec<u32>,
        arity: usize,
        out: Vec<Vec<u32>>,
    }

    fn slot(needs: &[(&str, usize)], key: &str) -> usize {
        needs.iter().position(|(k, _)| *k == key).expect("pool token matches type")
    }

    fn go(s: &mut Search<'_>, start: usize) {
        if s.out.len() >= ENUMERATION_LIMIT {
            return;
        }
        if s.chosen.len() == s.arity {
            s.out.push(s.chosen.clone());
            return;
        }
        let remaining = s.arity - s.chosen.len();
        for i in start..s.pool.len() {
            if s.pool.len() - i < remaining {
                break;
            }
            let tok = s.pool[i];
            let li = slot(&s.lemma_left, &tok.lemma);
            let pi = slot(&s.pos_left, &tok.upos);
            if s.lemma_left[li].1 == 0 || s.pos_left[pi].1 == 0 {
                continue;
            }
            s.lemma_left[li].1 -= 1;
            s.pos_left[pi].1 -= 1;
            s.chosen.push(tok.id);
            go(s, i + 1);
            s.chosen.pop();
            s.lemma_left[li].1 += 1;
            s.pos_left[pi].1 += 1;
        }
    }

    let mut search = Search {
        pool: &pool,
        lemma_left: lemma_need,
        pos_left: pos_need,
        chosen: Vec::new(),
        arity: ty.arity(),
        out: Vec::new(),
    };
    go(&mut search, 0);
    search.out
}

fn span(ids: &[u32]) -> u32 {
    ids[ids.len() - 1] - ids[0]
}

fn overlaps(a: &[u32], b: &[u32]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

/// Extracts candidates from one sentence. Sentences without a dependency
/// tree yield nothing.
pub fn extract_sentence(
    sentence: &Sentence,
    lexicon: &Lexicon,
    config: &ExtractionConfig,
    stats: &mut ExtractionStats,
) -> Vec<Candidate> {
    stats.sentences += 1;
    let Some(tree) = sentence.tree() else {
        stats.skipped_unparsed += 1;
        return Vec::new();
    };
    let labeled = sentence.is_annotated();
    let gold_sets: BTreeSet<&[u32]> = sentence.gold.iter().map(|g| g.token_ids.as_slice()).collect();

    let mut type_indices = BTreeSet::new();
    for t in &sentence.tokens {
        type_indices.extend(lexicon.types_with_lemma(&t.lemma).iter().copied());
    }

    let mut out = Vec::new();
    for index in type_indices {
        let ty = lexicon.type_at(index);
        let mut combos = enumerate(sentence, ty);
        if combos.is_empty() {
            continue;
        }
        stats.matched += combos.len();
        combos.sort_by(|a, b| (span(a), a).cmp(&(span(b), b)));
        let survivors = filter_type(sentence, &tree, ty, combos, &gold_sets, config, stats);
        for ids in survivors {
            let label = if !labeled {
                Label::Unknown
            } else if gold_sets.contains(ids.as_slice()) {
                Label::Positive
            } else {
                Label::Negative
            };
            out.push(Candidate {
                sent_id: sentence.sent_id.clone(),
                profile: Profile::compute(sentence, Some(&tree), &ids),
                token_ids: ids,
                type_id: ty.type_id,
                label,
            });
        }
    }
    out.sort_by(|a, b| (&a.token_ids, a.type_id).cmp(&(&b.token_ids, b.type_id)));
    stats.emitted += out.len();
    out
}

/// Applies the cap, the connectivity and insertion rules, then overlap
/// resolution. `combos` must be sorted by (span, ids).
fn filter_type(
    sentence: &Sentence,
    tree: &DepTree,
    ty: &VmweType,
    combos: Vec<Vec<u32>>,
    gold_sets: &BTreeSet<&[u32]>,
    config: &ExtractionConfig,
    stats: &mut ExtractionStats,
) -> Vec<Vec<u32>> {
    let insertion_limit = config.insertion_override.unwrap_or(ty.max_insert_count);
    let mut passing = Vec::new();
    for (rank, ids) in combos.into_iter().enumerate() {
        let gold = gold_sets.contains(ids.as_slice());
        if rank >= config.combination_cap && !gold {
            stats.dropped_cap += 1;
            continue;
        }
        let tokens: Vec<&Token> = ids.iter().filter_map(|&id| sentence.token(id)).collect();
        if let Some((a, b)) = constrained_pair(&tokens) {
            if tree.distance(a, b) > config.max_path {
                stats.dropped_connectivity += 1;
                continue;
            }
        }
        if insert_count(&ids) > insertion_limit {
            stats.dropped_insertion += 1;
            continue;
        }
        passing.push((ids, gold));
    }

    let mut kept: Vec<Vec<u32>> = Vec::new();
    let mut rejected_gold = Vec::new();
    for (ids, gold) in passing {
        if kept.iter().any(|k| overlaps(k, &ids)) {
            if gold {
                rejected_gold.push(ids);
            } else {
                stats.dropped_overlap += 1;
            }
        } else {
            kept.push(ids);
        }
    }
    kept.extend(rejected_gold);
    kept
}

/// Runs [`extract_sentence`] over a corpus, in corpus order.
pub fn extract_candidates(
    corpus: &[Sentence],
    lexicon: &Lexicon,
    config: &ExtractionConfig,
) -> (Vec<Candidate>, ExtractionStats) {
    let mut stats = ExtractionStats::default();
    let mut out = Vec::new();
    for sentence in corpus {
        out.extend(extract_sentence(sentence, lexicon, config, &mut stats));
    }
    (out, stats)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub candidates: usize,
    pub positive: usize,
    pub negative: usize,
    /// Gold VMWEs whose (lemmas, UPOS) key is a lexicon type.
    pub gold_retained: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Candidate-level precision and recall against the corpus' gold VMWEs.
pub fn extraction_report(
    candidates: &[Candidate],
    gold: &[Sentence],
    lexicon: &Lexicon,
) -> Result<ExtractionReport> {
    if candidates.iter().any(|c| c.label == Label::Unknown)
        || gold.iter().any(|s| !s.tokens.is_empty() && !s.is_annotated())
    {
        return Err(Error::Unlabeled("extraction report".into()));
    }
    let positive = candidates.iter().filter(|c| c.label == Label::Positive).count();
    let negative = candidates.len() - positive;
    let gold_retained = gold
        .iter()
        .flat_map(|s| s.gold.iter())
        .filter(|g| lexicon.lookup(&g.lemmas, &g.pos).is_some())
        .count();
    // Distinct gold VMWEs covered; one candidate per (sentence, token set, type).
    let covered: BTreeSet<(&str, &[u32])> = candidates
        .iter()
        .filter(|c| c.label == Label::Positive)
        .map(|c| (c.sent_id.as_str(), c.token_ids.as_slice()))
        .collect();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(ExtractionReport {
        candidates: candidates.len(),
        positive,
        negative,
        gold_retained,
        precision: ratio(positive, candidates.len()),
        recall: ratio(covered.len(), gold_retained),
    })
}

/// Lemma and UPOS multisets of a candidate's components.
pub fn candidate_keys(sentence: &Sentence, ids: &[u32]) -> (Multiset, Multiset) {
    (sentence.lemmas_of(ids), sentence.pos_of(ids))
}

/// Groups candidates by sentence id, preserving order.
pub fn by_sentence(candidates: &[Candidate]) -> BTreeMap<&str, Vec<&Candidate>> {
    let mut map: BTreeMap<&str, Vec<&Candidate>> = BTreeMap::new();
    for c in candidates {
        map.entry(c.sent_id.as_str()).or_default().push(c);
    }
    map
}
