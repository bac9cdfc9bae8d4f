//! Inventory of VMWE types attested in an annotated training corpus.
//!
//! A type is keyed by its (lemma multiset, UPOS multiset) pair. Besides the
//! frequency-filtered types, the lexicon records every annotated lemma
//! multiset with its training surface forms; seen-in-train scoring keys on
//! lemmas only.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::{Category, Sentence};
use crate::profile::{assign_roles, Profile, Role};

pub const LEXICON_VERSION: u32 = 1;

/// Sorted list of strings compared as a multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset(Vec<String>);

impl Multiset {
    pub fn new<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = items.into_iter().map(Into::into).collect();
        v.sort();
        Multiset(v)
    }

    pub fn items(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: &str) -> bool {
        self.0.binary_search_by(|x| x.as_str().cmp(item)).is_ok()
    }

    /// Distinct items with multiplicities.
    pub fn counts(&self) -> Vec<(&str, usize)> {
        let mut out: Vec<(&str, usize)> = Vec::new();
        for item in &self.0 {
            match out.last_mut() {
                Some((last, n)) if *last == item.as_str() => *n += 1,
                _ => out.push((item.as_str(), 1)),
            }
        }
        out
    }
}

impl fmt::Display for Multiset {
    /// Canonical form: items sorted and joined by `;`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(item)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmweType {
    pub type_id: u32,
    pub lemmas: Multiset,
    pub pos: Multiset,
    /// Majority category over the occurrences.
    pub category: Category,
    /// Roles shared by every occurrence (derived from `pos`).
    pub roles: Vec<Role>,
    pub occurrences: Vec<Profile>,
    pub train_count: usize,
    /// Largest uncapped insert count among the occurrences.
    pub max_insert_count: usize,
}

impl VmweType {
    pub fn key(&self) -> String {
        alloc::format!("{}|{}", self.lemmas, self.pos)
    }

    pub fn arity(&self) -> usize {
        self.lemmas.len()
    }
}

/// Every annotated lemma multiset of the training corpus, regardless of
/// frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeenEntry {
    pub lemmas: Multiset,
    pub count: usize,
    pub category: Category,
    /// Distinct component surface sequences, forms in linear order.
    pub surfaces: BTreeSet<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub gold_vmwes: usize,
    pub skipped_unparsed: usize,
    pub types_total: usize,
    pub types_retained: usize,
    pub occurrences_retained: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "LexiconFile", into = "LexiconFile")]
pub struct Lexicon {
    pub min_count: usize,
    types: Vec<VmweType>,
    seen: Vec<SeenEntry>,
    stats: BuildStats,
    by_key: BTreeMap<(Multiset, Multiset), usize>,
    by_lemma: BTreeMap<String, Vec<usize>>,
    seen_by_lemmas: BTreeMap<Multiset, usize>,
}

#[derive(Serialize, Deserialize)]
struct LexiconFile {
    version: u32,
    min_count: usize,
    stats: BuildStats,
    types: Vec<VmweType>,
    seen: Vec<SeenEntry>,
}

impl From<LexiconFile> for Lexicon {
    fn from(f: LexiconFile) -> Self {
        Lexicon::from_parts(f.min_count, f.types, f.seen, f.stats)
    }
}

impl From<Lexicon> for LexiconFile {
    fn from(l: Lexicon) -> Self {
        LexiconFile {
            version: LEXICON_VERSION,
            min_count: l.min_count,
            stats: l.stats,
            types: l.types,
            seen: l.seen,
        }
    }
}

impl Lexicon {
    fn from_parts(min_count: usize, types: Vec<VmweType>, seen: Vec<SeenEntry>, stats: BuildStats) -> Self {
        let mut by_key = BTreeMap::new();
        let mut by_lemma: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, t) in types.iter().enumerate() {
            by_key.insert((t.lemmas.clone(), t.pos.clone()), i);
            for (lemma, _) in t.lemmas.counts() {
                by_lemma.entry(lemma.to_string()).or_default().push(i);
            }
        }
        let seen_by_lemmas = seen.iter().enumerate().map(|(i, e)| (e.lemmas.clone(), i)).collect();
        Lexicon {
            min_count,
            types,
            seen,
            stats,
            by_key,
            by_lemma,
            seen_by_lemmas,
        }
    }

    /// Restricts the lexicon to the given type ids, keeping the seen records.
    pub fn subset(&self, type_ids: &BTreeSet<u32>) -> Lexicon {
        let types = self
            .types
            .iter()
            .filter(|t| type_ids.contains(&t.type_id))
            .cloned()
            .collect();
        Lexicon::from_parts(self.min_count, types, self.seen.clone(), self.stats.clone())
    }

    pub fn types(&self) -> &[VmweType] {
        &self.types
    }

    pub fn seen(&self) -> &[SeenEntry] {
        &self.seen
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn get(&self, type_id: u32) -> Option<&VmweType> {
        // Ids are positions unless the lexicon was subset.
        match self.types.get(type_id as usize) {
            Some(t) if t.type_id == type_id => Some(t),
            _ => self.types.iter().find(|t| t.type_id == type_id),
        }
    }

    /// Exact match on both multisets.
    pub fn lookup(&self, lemmas: &Multiset, pos: &Multiset) -> Option<&VmweType> {
        self.by_key
            .get(&(lemmas.clone(), pos.clone()))
            .map(|&i| &self.types[i])
    }

    /// Indices of types having `lemma` among their components.
    pub(crate) fn types_with_lemma(&self, lemma: &str) -> &[usize] {
        self.by_lemma.get(lemma).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn type_at(&self, index: usize) -> &VmweType {
        &self.types[index]
    }

    /// Training record for a lemma multiset annotated at least once.
    pub fn seen_entry(&self, lemmas: &Multiset) -> Option<&SeenEntry> {
        self.seen_by_lemmas.get(lemmas).map(|&i| &self.seen[i])
    }

    pub fn is_seen(&self, lemmas: &Multiset) -> bool {
        self.seen_by_lemmas.contains_key(lemmas)
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Total retained occurrences.
    pub fn occurrence_count(&self) -> usize {
        self.types.iter().map(|t| t.train_count).sum()
    }
}

fn majority(categories: &BTreeMap<Category, usize>) -> Category {
    let mut best = Category::Other;
    let mut best_n = 0;
    for (&c, &n) in categories {
        if n > best_n {
            best = c;
            best_n = n;
        }
    }
    best
}

/// Builds the lexicon; types with fewer than `min_count` usable occurrences
/// are dropped. Occurrences in sentences without a dependency tree are
/// skipped.
pub fn build_lexicon(train: &[Sentence], min_count: usize) -> Lexicon {
    struct Acc {
        occurrences: Vec<Profile>,
        categories: BTreeMap<Category, usize>,
    }
    struct SeenAcc {
        count: usize,
        categories: BTreeMap<Category, usize>,
        surfaces: BTreeSet<Vec<String>>,
    }

    let mut stats = BuildStats::default();
    let mut groups: BTreeMap<(Multiset, Multiset), Acc> = BTreeMap::new();
    let mut seen: BTreeMap<Multiset, SeenAcc> = BTreeMap::new();

    for sentence in train {
        if sentence.gold.is_empty() {
            continue;
        }
        let tree = sentence.tree();
        for gold in &sentence.gold {
            stats.gold_vmwes += 1;
            let entry = seen.entry(gold.lemmas.clone()).or_insert_with(|| SeenAcc {
                count: 0,
                categories: BTreeMap::new(),
                surfaces: BTreeSet::new(),
            });
            entry.count += 1;
            *entry.categories.entry(gold.category).or_insert(0) += 1;
            entry.surfaces.insert(sentence.surface_of(&gold.token_ids));

            let Some(tree) = tree.as_ref() else {
                stats.skipped_unparsed += 1;
                warn!(
                    "sentence {}: no dependency tree, VMWE {} skipped",
                    sentence.sent_id, gold.index
                );
                continue;
            };
            let acc = groups
                .entry((gold.lemmas.clone(), gold.pos.clone()))
                .or_insert_with(|| Acc {
                    occurrences: Vec::new(),
                    categories: BTreeMap::new(),
                });
            acc.occurrences
                .push(Profile::compute(sentence, Some(tree), &gold.token_ids));
            *acc.categories.entry(gold.category).or_insert(0) += 1;
        }
    }

    stats.types_total = groups.len();
    let mut types = Vec::new();
    for ((lemmas, pos), acc) in groups {
        if acc.occurrences.len() < min_count.max(1) {
            continue;
        }
        let roles = acc
            .occurrences
            .first()
            .map(|p| p.components.keys().cloned().collect::<Vec<_>>())
            .unwrap_or_else(|| assign_roles(pos.items().iter().map(String::as_str)));
        let max_insert_count = acc.occurrences.iter().map(|p| p.insert_count).max().unwrap_or(0);
        types.push(VmweType {
            type_id: types.len() as u32,
            category: majority(&acc.categories),
            train_count: acc.occurrences.len(),
            occurrences: acc.occurrences,
            lemmas,
            pos,
            roles,
            max_insert_count,
        });
    }
    stats.types_retained = types.len();
    stats.occurrences_retained = types.iter().map(|t| t.train_count).sum();

    let seen = seen
        .into_iter()
        .map(|(lemmas, acc)| SeenEntry {
            lemmas,
            count: acc.count,
            category: majority(&acc.categories),
            surfaces: acc.surfaces,
        })
        .collect();
    Lexicon::from_parts(min_count, types, seen, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_cupt;
    use alloc::format;
    use alloc::string::String;

    fn lvc_sentence(id: &str, det: &str) -> String {
        format!(
            "# sent_id = {id}\n\
1\tIl\til\tPRON\t_\t_\t2\tnsubj\t_\t_\t*\n\
2\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\t1:LVC.full\n\
3\t{det}\t{det}\tDET\t_\t_\t4\tdet\t_\t_\t*\n\
4\tmesures\tmesure\tNOUN\t_\t_\t2\tobj\t_\t_\t1\n\n"
        )
    }

    fn vid_once(id: &str) -> String {
        format!(
            "# sent_id = {id}\n\
1\tIl\til\tPRON\t_\t_\t2\tnsubj\t_\t_\t*\n\
2\tcoupe\tcouper\tVERB\t_\t_\t0\troot\t_\t_\t1:VID\n\
3\tcourt\tcourt\tADV\t_\t_\t2\tadvmod\t_\t_\t1\n\n"
        )
    }

    #[test]
    fn two_occurrences_one_type() {
        let src = [lvc_sentence("a", "des"), lvc_sentence("b", "les"), vid_once("c")].concat();
        let corpus = parse_cupt(&src).unwrap();
        let lex = build_lexicon(&corpus, 2);
        assert_eq!(lex.len(), 1);
        let t = &lex.types()[0];
        assert_eq!(t.train_count, 2);
        assert_eq!(t.occurrences.len(), 2);
        assert_eq!(t.category, Category::Lvc);
        assert_eq!(t.max_insert_count, 1);
        assert_eq!(lex.stats().gold_vmwes, 3);
        // Seen records ignore the frequency threshold.
        assert!(lex.is_seen(&Multiset::new(["couper", "court"])));
    }

    #[test]
    fn singletons_give_empty_lexicon() {
        let src = [lvc_sentence("a", "des"), vid_once("c")].concat();
        let lex = build_lexicon(&parse_cupt(&src).unwrap(), 2);
        assert!(lex.is_empty());
    }

    #[test]
    fn no_annotations_is_empty() {
        let src = lvc_sentence("a", "des").replace("1:LVC.full", "*").replace("\t1\n", "\t*\n");
        let lex = build_lexicon(&parse_cupt(&src).unwrap(), 2);
        assert!(lex.is_empty());
        assert!(lex.seen().is_empty());
    }

    #[test]
    fn lookup_requires_both_keys() {
        let src = [lvc_sentence("a", "des"), lvc_sentence("b", "les")].concat();
        let lex = build_lexicon(&parse_cupt(&src).unwrap(), 2);
        let lemmas = Multiset::new(["prendre", "mesure"]);
        assert!(lex.lookup(&lemmas, &Multiset::new(["VERB", "NOUN"])).is_some());
        assert!(lex.lookup(&lemmas, &Multiset::new(["VERB", "VERB"])).is_none());
        assert!(lex.lookup(&Multiset::new(["prendre"]), &Multiset::new(["VERB"])).is_none());
    }

    #[test]
    fn unparsed_occurrence_skipped() {
        let unparsed = lvc_sentence("u", "des")
            .lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split('\t').collect();
                if cols.len() == 11 {
                    cols[6] = "_";
                }
                cols.join("\t")
            })
            .collect::<Vec<_>>()
            .join("\n")
            + "\n\n";
        let src = [lvc_sentence("a", "des"), unparsed].concat();
        let lex = build_lexicon(&parse_cupt(&src).unwrap(), 2);
        assert!(lex.is_empty());
        assert_eq!(lex.stats().skipped_unparsed, 1);
    }

    #[test]
    fn json_round_trip_reindexes() {
        let src = [lvc_sentence("a", "des"), lvc_sentence("b", "les")].concat();
        let lex = build_lexicon(&parse_cupt(&src).unwrap(), 2);
        let json = serde_json::to_string(&lex).unwrap();
        assert!(json.contains("\"version\":1"));
        let back: Lexicon = serde_json::from_str(&json).unwrap();
        assert_eq!(back, lex);
        assert!(back
            .lookup(&Multiset::new(["mesure", "prendre"]), &Multiset::new(["NOUN", "VERB"]))
            .is_some());
    }
}
