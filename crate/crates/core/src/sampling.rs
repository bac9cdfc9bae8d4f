//! Stratified sampling of candidates from an unlabeled corpus for manual
//! annotation.
//!
//! Types are drawn per category from three training-frequency bands, then
//! extracted from every corpus part; each part contributes the same number
//! of candidates.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Category, Sentence};
use crate::extraction::{extract_candidates, Candidate, ExtractionConfig};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    High,
    Median,
    Low,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::High, Band::Median, Band::Low];
}

/// Number of types wanted from each frequency band of one category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub category: Category,
    #[serde(default)]
    pub high: usize,
    #[serde(default)]
    pub median: usize,
    #[serde(default)]
    pub low: usize,
}

impl Stratum {
    fn wanted(&self, band: Band) -> usize {
        match band {
            Band::High => self.high,
            Band::Median => self.median,
            Band::Low => self.low,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataConfig {
    pub strata: Vec<Stratum>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedType {
    pub type_id: u32,
    pub category: Category,
    pub band: Band,
    pub train_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleItem {
    pub part: String,
    /// Space-joined forms of the sentence.
    pub context: String,
    pub candidate: Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub types: Vec<SelectedType>,
    pub per_part: usize,
    pub items: Vec<SampleItem>,
    pub warnings: Vec<String>,
}

/// One named slice of the external corpus.
pub struct CorpusPart<'a> {
    pub name: &'a str,
    pub sentences: &'a [Sentence],
}

/// Splits types sorted by decreasing train count into three near-equal
/// bands; ties in count keep lexicon order.
fn bands(lexicon: &Lexicon, category: Category) -> [Vec<u32>; 3] {
    let mut types: Vec<(usize, u32)> = lexicon
        .types()
        .iter()
        .filter(|t| t.category == category)
        .map(|t| (t.train_count, t.type_id))
        .collect();
    types.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let n = types.len();
    let cut = |i: usize| (n * i).div_ceil(3);
    let ids = |lo: usize, hi: usize| types[lo..hi].iter().map(|t| t.1).collect::<Vec<_>>();
    [ids(0, cut(1)), ids(cut(1), cut(2)), ids(cut(2), n)]
}

/// Picks the strata's types, extracts their candidates from every part and
/// trims each part to the same count, at most `cap / parts`.
pub fn sample_external(
    lexicon: &Lexicon,
    parts: &[CorpusPart<'_>],
    strata: &StrataConfig,
    cap: usize,
    extraction: &ExtractionConfig,
) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(strata.seed);
    let mut warnings = Vec::new();
    let mut selected = Vec::new();
    for stratum in &strata.strata {
        let banded = bands(lexicon, stratum.category);
        for (band, mut pool) in Band::ALL.into_iter().zip(banded) {
            let wanted = stratum.wanted(band);
            if wanted == 0 {
                continue;
            }
            if pool.len() < wanted {
                let msg = format!(
                    "{} {:?} band has {} types, {} requested",
                    stratum.category,
                    band,
                    pool.len(),
                    wanted
                );
                warn!("{msg}");
                warnings.push(msg);
            }
            pool.shuffle(&mut rng);
            pool.truncate(wanted);
            pool.sort_unstable();
            for type_id in pool {
                let ty = lexicon.get(type_id).expect("banded ids come from the lexicon");
                selected.push(SelectedType {
                    type_id,
                    category: stratum.category,
                    band,
                    train_count: ty.train_count,
                });
            }
        }
    }

    let ids: BTreeSet<u32> = selected.iter().map(|t| t.type_id).collect();
    let sub = lexicon.subset(&ids);
    let mut per_part: Vec<Vec<SampleItem>> = Vec::with_capacity(parts.len());
    for part in parts {
        let (cands, _) = extract_candidates(part.sentences, &sub, extraction);
        let items = cands
            .into_iter()
            .map(|candidate| {
                let context = part
                    .sentences
                    .iter()
                    .find(|s| s.sent_id == candidate.sent_id)
                    .map(|s| s.tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" "))
                    .unwrap_or_default();
                SampleItem {
                    part: part.name.into(),
                    context,
                    candidate,
                }
            })
            .collect();
        per_part.push(items);
    }

    let quota = if parts.is_empty() {
        0
    } else {
        let available = per_part.iter().map(Vec::len).min().unwrap_or(0);
        available.min(cap / parts.len())
    };
    let mut items = Vec::new();
    for mut part_items in per_part {
        let mut order: Vec<usize> = (0..part_items.len()).collect();
        order.shuffle(&mut rng);
        let mut keep: Vec<usize> = order.into_iter().take(quota).collect();
        keep.sort_unstable();
        let mut slots: Vec<Option<SampleItem>> = part_items.drain(..).map(Some).collect();
        items.extend(keep.into_iter().filter_map(|i| slots[i].take()));
    }
    Sample {
        types: selected,
        per_part: quota,
        items,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_cupt;
    use crate::lexicon::build_lexicon;
    use alloc::vec;

    const TRAIN: &str = "# sent_id = a\n\
1\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\t1:LVC.full\n\
2\tmesure\tmesure\tNOUN\t_\t_\t1\tobj\t_\t_\t1\n\
\n\
# sent_id = b\n\
1\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\t1:LVC.full\n\
2\tmesure\tmesure\tNOUN\t_\t_\t1\tobj\t_\t_\t1\n\
\n\
# sent_id = c\n\
1\ta\tavoir\tVERB\t_\t_\t0\troot\t_\t_\t1:VID\n\
2\tlieu\tlieu\tNOUN\t_\t_\t1\tobj\t_\t_\t1\n\
\n";

    const RAW: &str = "# sent_id = r1\n\
1\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\n\
2\tmesure\tmesure\tNOUN\t_\t_\t1\tobj\t_\t_\n\
\n\
# sent_id = r2\n\
1\ta\tavoir\tVERB\t_\t_\t0\troot\t_\t_\n\
2\tlieu\tlieu\tNOUN\t_\t_\t1\tobj\t_\t_\n\
\n\
# sent_id = r3\n\
1\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\n\
2\tmesure\tmesure\tNOUN\t_\t_\t1\tobj\t_\t_\n\
\n";

    fn lvc_only() -> StrataConfig {
        StrataConfig {
            strata: vec![Stratum {
                category: Category::Lvc,
                high: 1,
                median: 0,
                low: 0,
            }],
            seed: 1,
        }
    }

    #[test]
    fn single_type_gets_all_its_candidates() {
        let lex = build_lexicon(&parse_cupt(TRAIN).unwrap(), 1);
        let raw = parse_cupt(RAW).unwrap();
        let parts = [CorpusPart { name: "web", sentences: &raw }];
        let s = sample_external(&lex, &parts, &lvc_only(), 100, &ExtractionConfig::default());
        let sents: Vec<&str> = s.items.iter().map(|i| i.candidate.sent_id.as_str()).collect();
        assert_eq!(sents, ["r1", "r3"]);
        assert_eq!(s.items[0].context, "prend mesure");
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn zero_cap_is_empty() {
        let lex = build_lexicon(&parse_cupt(TRAIN).unwrap(), 1);
        let raw = parse_cupt(RAW).unwrap();
        let parts = [CorpusPart { name: "web", sentences: &raw }];
        let s = sample_external(&lex, &parts, &lvc_only(), 0, &ExtractionConfig::default());
        assert!(s.items.is_empty());
    }

    #[test]
    fn parts_are_balanced_and_short_strata_warn() {
        let lex = build_lexicon(&parse_cupt(TRAIN).unwrap(), 1);
        let raw = parse_cupt(RAW).unwrap();
        let parts = [
            CorpusPart { name: "p1", sentences: &raw[..1] },
            CorpusPart { name: "p2", sentences: &raw[2..] },
        ];
        let mut cfg = lvc_only();
        cfg.strata[0].low = 3;
        let s = sample_external(&lex, &parts, &cfg, 100, &ExtractionConfig::default());
        assert_eq!(s.per_part, 1);
        assert_eq!(s.items.len(), 2);
        assert_eq!(s.warnings.len(), 1);
    }
}
