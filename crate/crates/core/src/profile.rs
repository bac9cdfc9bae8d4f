//! Morphosyntactic profile of one occurrence of a VMWE type: insertions,
//! per-component morphology and dependents, syntactic connection.
//!
//! The same record describes attested training occurrences and extracted
//! candidates, so relative features reduce to field comparisons.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::tree::DepTree;

/// Insert counts at or above this value share one bucket, written `5+`.
pub const INSERT_CAP: usize = 5;

/// Component role: its UPOS tag, suffixed `#2`, `#3`, ... when the tag
/// repeats, numbered in linear order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Role(pub String);

impl Role {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Assigns roles to UPOS tags listed in linear order.
pub fn assign_roles<'a>(upos_in_order: impl IntoIterator<Item = &'a str>) -> Vec<Role> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    upos_in_order
        .into_iter()
        .map(|tag| {
            let n = seen.entry(tag).or_insert(0);
            *n += 1;
            if *n == 1 {
                Role(tag.to_string())
            } else {
                Role(format!("{tag}#{n}"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connection {
    /// Path length 1.
    Direct,
    /// Path length 2: one intermediate node.
    Quasi,
    None,
}

impl Connection {
    pub fn from_distance(d: Option<u32>) -> Connection {
        match d {
            Some(1) => Connection::Direct,
            Some(2) => Connection::Quasi,
            _ => Connection::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Connection::Direct => "direct",
            Connection::Quasi => "quasi",
            Connection::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentProfile {
    pub lemma: String,
    pub morph: BTreeSet<String>,
    /// Deprels of dependents that are not themselves components.
    pub deprels: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    /// UPOS of tokens strictly between the leftmost and rightmost component.
    pub insert_pos: Vec<String>,
    /// Uncapped number of inserted tokens.
    pub insert_count: usize,
    /// Uncapped per-tag insert counts.
    pub insert_pos_counts: BTreeMap<String, usize>,
    pub components: BTreeMap<Role, ComponentProfile>,
    /// Two components: their path length; more: minimum pairwise length.
    pub syntactic_distance: Option<u32>,
    pub connection: Connection,
    /// Component forms in linear order.
    pub surface: Vec<String>,
}

impl Profile {
    /// Builds the profile of the given component tokens. `tree` must come
    /// from `sentence`; without it the dependency fields stay empty.
    pub fn compute(sentence: &Sentence, tree: Option<&DepTree>, component_ids: &[u32]) -> Profile {
        let mut ids: Vec<u32> = component_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let (lo, hi) = (ids[0], ids[ids.len() - 1]);

        let mut insert_pos = Vec::new();
        let mut insert_pos_counts: BTreeMap<String, usize> = BTreeMap::new();
        for id in lo + 1..hi {
            if ids.binary_search(&id).is_ok() {
                continue;
            }
            if let Some(t) = sentence.token(id) {
                insert_pos.push(t.upos.clone());
                *insert_pos_counts.entry(t.upos.clone()).or_insert(0) += 1;
            }
        }

        let tokens: Vec<_> = ids.iter().filter_map(|&id| sentence.token(id)).collect();
        let roles = assign_roles(tokens.iter().map(|t| t.upos.as_str()));
        let mut components = BTreeMap::new();
        for (role, token) in roles.into_iter().zip(&tokens) {
            let deprels = sentence
                .tokens
                .iter()
                .filter(|d| d.head == Some(token.id) && ids.binary_search(&d.id).is_err())
                .map(|d| d.deprel.clone())
                .collect();
            components.insert(
                role,
                ComponentProfile {
                    lemma: token.lemma.clone(),
                    morph: token.morph_feats().map(|f| f.to_string()).collect(),
                    deprels,
                },
            );
        }

        let syntactic_distance = tree.and_then(|t| t.min_pairwise(&ids));
        Profile {
            insert_count: insert_pos.len(),
            insert_pos,
            insert_pos_counts,
            components,
            connection: Connection::from_distance(syntactic_distance),
            syntactic_distance,
            surface: tokens.iter().map(|t| t.form.clone()).collect(),
        }
    }

    pub fn capped_insert_count(&self) -> usize {
        self.insert_count.min(INSERT_CAP)
    }

    pub fn capped_pos_count(&self, tag: &str) -> usize {
        self.insert_pos_counts.get(tag).copied().unwrap_or(0).min(INSERT_CAP)
    }
}

/// `0`..`4`, or `5+`.
pub fn bucket(n: usize) -> String {
    if n >= INSERT_CAP {
        "5+".to_string()
    } else {
        n.to_string()
    }
}
