//! Absolute (categorical) and relative (binary) candidate features, and
//! their one-hot encoding.
//!
//! A relative feature is true when the candidate's property equals that of
//! at least one attested occurrence of its type. Features of roles a type
//! does not have are absent from the vector, never false.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::Candidate;
use crate::lexicon::{Lexicon, VmweType};
use crate::profile::{bucket, ComponentProfile, Profile, Role};

/// UPOS tags with a dedicated `REL_insert_<POS>` feature.
pub const INSERT_TAGS: [&str; 17] = [
    "ADP", "ADV", "ADJ", "CCONJ", "DET", "NOUN", "NUM", "PRON", "PUNCT", "SCONJ", "VERB", "AUX",
    "PART", "PROPN", "INTJ", "SYM", "X",
];

const ABS_FIXED: [&str; 6] = [
    "ABS_LemmaSet",
    "ABS_VMWEcat",
    "ABS_insertSeq",
    "ABS_insertCount",
    "ABS_connection",
    "ABS_syntacticDistance",
];
const REL_FIXED: [&str; 4] = [
    "REL_insertSeq",
    "REL_0to5insertions",
    "REL_connection",
    "REL_SyntacticDistance",
];
const ABS_ROLE_PREFIXES: [&str; 3] = ["ABS_lemma_", "ABS_morph_", "ABS_depLabels_"];
const REL_ROLE_PREFIXES: [&str; 3] = ["REL_lemma_", "REL_morph_", "REL_depLabels_"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    #[serde(rename = "ABS")]
    Abs,
    #[serde(rename = "REL")]
    Rel,
}

/// Schema-checked feature name such as `REL_insertSeq` or `ABS_lemma_VERB`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureId(String);

fn is_role(s: &str) -> bool {
    let (tag, suffix) = match s.split_once('#') {
        Some((t, n)) => (t, Some(n)),
        None => (s, None),
    };
    !tag.is_empty()
        && tag.chars().all(|c| c.is_ascii_uppercase() || c == '_')
        && suffix.is_none_or(|n| n.parse::<u32>().is_ok_and(|n| n >= 2))
}

impl FeatureId {
    pub fn parse(name: &str) -> Result<FeatureId> {
        let valid = ABS_FIXED.contains(&name)
            || REL_FIXED.contains(&name)
            || name
                .strip_prefix("REL_insert_")
                .is_some_and(|tag| INSERT_TAGS.contains(&tag))
            || ABS_ROLE_PREFIXES
                .iter()
                .chain(REL_ROLE_PREFIXES.iter())
                .any(|p| name.strip_prefix(p).is_some_and(is_role));
        if valid {
            Ok(FeatureId(name.to_string()))
        } else {
            Err(Error::InvalidArgument(format!("unknown feature '{name}'")))
        }
    }

    fn known(name: String) -> FeatureId {
        debug_assert!(FeatureId::parse(&name).is_ok(), "{name}");
        FeatureId(name)
    }

    pub fn kind(&self) -> FeatureKind {
        if self.0.starts_with("REL_") {
            FeatureKind::Rel
        } else {
            FeatureKind::Abs
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for FeatureId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        FeatureId::parse(&s)
    }
}

impl From<FeatureId> for String {
    fn from(f: FeatureId) -> String {
        f.0
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureValue {
    Bool(bool),
    Cat(String),
}

impl FeatureValue {
    /// Whether this value lights up a column of the encoding.
    pub fn is_active(&self) -> bool {
        match self {
            FeatureValue::Bool(b) => *b,
            FeatureValue::Cat(_) => true,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Bool(b) => write!(f, "{b}"),
            FeatureValue::Cat(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector {
    pub values: BTreeMap<FeatureId, FeatureValue>,
}

impl FeatureVector {
    pub fn get(&self, f: &FeatureId) -> Option<&FeatureValue> {
        self.values.get(f)
    }

    /// Activated (feature, value) pairs: every ABS value and each true REL.
    pub fn active_pairs(&self) -> impl Iterator<Item = (&FeatureId, &FeatureValue)> {
        self.values.iter().filter(|(_, v)| v.is_active())
    }
}

fn joined(items: impl IntoIterator<Item = impl AsRef<str>>, sep: &str) -> String {
    let mut out = String::new();
    for (i, it) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        out.push_str(it.as_ref());
    }
    if out.is_empty() {
        "EMPTY".to_string()
    } else {
        out
    }
}

fn insert_seq(p: &Profile) -> String {
    joined(&p.insert_pos, "-")
}

fn role_values(c: &ComponentProfile) -> [String; 3] {
    [c.lemma.clone(), joined(&c.morph, "|"), joined(&c.deprels, "|")]
}

/// Computes every schema feature of a candidate against its type's
/// attested occurrences.
pub fn compute_features(candidate: &Candidate, lexicon: &Lexicon) -> Result<FeatureVector> {
    let ty = lexicon
        .get(candidate.type_id)
        .ok_or(Error::NoOccurrences {
            type_id: candidate.type_id,
        })?;
    features_for_profile(&candidate.profile, ty)
}

/// Feature vector of a profile measured against a type.
pub fn features_for_profile(p: &Profile, ty: &VmweType) -> Result<FeatureVector> {
    if ty.occurrences.is_empty() {
        return Err(Error::NoOccurrences { type_id: ty.type_id });
    }
    let occ = &ty.occurrences;
    let mut v = BTreeMap::new();
    let mut abs = |name: String, value: String| {
        v.insert(FeatureId::known(name), FeatureValue::Cat(value));
    };
    abs("ABS_LemmaSet".into(), ty.lemmas.to_string());
    abs("ABS_VMWEcat".into(), ty.category.as_str().to_string());
    abs("ABS_insertSeq".into(), insert_seq(p));
    abs("ABS_insertCount".into(), bucket(p.insert_count));
    abs("ABS_connection".into(), p.connection.as_str().to_string());
    if let Some(d) = p.syntactic_distance {
        abs("ABS_syntacticDistance".into(), bucket(d as usize));
    }
    for (role, comp) in &p.components {
        let [lemma, morph, deps] = role_values(comp);
        abs(format!("ABS_lemma_{role}"), lemma);
        abs(format!("ABS_morph_{role}"), morph);
        abs(format!("ABS_depLabels_{role}"), deps);
    }

    let mut rel = |name: String, value: bool| {
        v.insert(FeatureId::known(name), FeatureValue::Bool(value));
    };
    rel("REL_insertSeq".into(), occ.iter().any(|o| o.insert_pos == p.insert_pos));
    for tag in INSERT_TAGS {
        let mine = p.capped_pos_count(tag);
        rel(
            format!("REL_insert_{tag}"),
            occ.iter().any(|o| o.capped_pos_count(tag) == mine),
        );
    }
    rel(
        "REL_0to5insertions".into(),
        occ.iter()
            .any(|o| o.capped_insert_count() == p.capped_insert_count()),
    );
    rel(
        "REL_connection".into(),
        occ.iter().any(|o| o.connection == p.connection),
    );
    if p.syntactic_distance.is_some() {
        let mine = p.syntactic_distance.map(|d| bucket(d as usize));
        rel(
            "REL_SyntacticDistance".into(),
            occ.iter()
                .any(|o| o.syntactic_distance.map(|d| bucket(d as usize)) == mine),
        );
    }
    for (role, comp) in &p.components {
        let lookups: Vec<Option<&ComponentProfile>> =
            occ.iter().map(|o| o.components.get(role)).collect();
        let any = |f: &dyn Fn(&ComponentProfile) -> bool| lookups.iter().flatten().any(|c| f(c));
        rel(format!("REL_lemma_{role}"), any(&|c| c.lemma == comp.lemma));
        rel(format!("REL_morph_{role}"), any(&|c| c.morph == comp.morph));
        rel(format!("REL_depLabels_{role}"), any(&|c| c.deprels == comp.deprels));
    }
    Ok(FeatureVector { values: v })
}

/// Every feature the schema can produce for the given roles.
pub fn schema_features<'a>(roles: impl IntoIterator<Item = &'a Role>) -> Vec<FeatureId> {
    let mut out: Vec<FeatureId> = ABS_FIXED
        .iter()
        .chain(REL_FIXED.iter())
        .map(|s| FeatureId::known(s.to_string()))
        .collect();
    out.extend(INSERT_TAGS.iter().map(|t| FeatureId::known(format!("REL_insert_{t}"))));
    for role in roles {
        for p in ABS_ROLE_PREFIXES.iter().chain(REL_ROLE_PREFIXES.iter()) {
            out.push(FeatureId::known(format!("{p}{role}")));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One encoded column: an ABS (feature, value) pair, or a REL feature
/// (`value` is `None`) active when true.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Column {
    pub feature: FeatureId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl Column {
    /// `feature=value` for ABS columns, the bare feature for REL ones.
    pub fn name(&self) -> String {
        match &self.value {
            Some(v) => format!("{}={v}", self.feature),
            None => self.feature.to_string(),
        }
    }

    pub fn from_name(name: &str) -> Result<Column> {
        match name.split_once('=') {
            Some((f, v)) => Ok(Column {
                feature: FeatureId::parse(f)?,
                value: Some(v.to_string()),
            }),
            None => {
                let feature = FeatureId::parse(name)?;
                if feature.kind() == FeatureKind::Abs {
                    return Err(Error::InvalidArgument(format!(
                        "ABS column '{name}' lacks a value"
                    )));
                }
                Ok(Column { feature, value: None })
            }
        }
    }
}

/// Frozen mapping between columns and indices, sorted by column.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Column>", into = "Vec<Column>")]
pub struct ColumnDictionary {
    columns: Vec<Column>,
    index: BTreeMap<Column, u32>,
}

impl From<Vec<Column>> for ColumnDictionary {
    fn from(mut columns: Vec<Column>) -> Self {
        columns.sort();
        columns.dedup();
        let index = columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        ColumnDictionary { columns, index }
    }
}

impl From<ColumnDictionary> for Vec<Column> {
    fn from(d: ColumnDictionary) -> Self {
        d.columns
    }
}

/// Binary rows stored as sorted active-column lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub n_cols: usize,
    pub rows: Vec<Vec<u32>>,
}

impl SparseMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn select_rows(&self, indices: &[usize]) -> SparseMatrix {
        SparseMatrix {
            n_cols: self.n_cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

fn keep(selected: Option<&[FeatureId]>, f: &FeatureId) -> bool {
    selected.is_none_or(|s| s.contains(f))
}

impl ColumnDictionary {
    /// Columns observed in `vectors`, restricted to `selected` features.
    /// REL features get a column as soon as they occur, true or false.
    pub fn build(vectors: &[FeatureVector], selected: Option<&[FeatureId]>) -> Self {
        let mut cols = alloc::collections::BTreeSet::new();
        for v in vectors {
            for (f, value) in &v.values {
                if !keep(selected, f) {
                    continue;
                }
                let col = match value {
                    FeatureValue::Cat(s) => Column {
                        feature: f.clone(),
                        value: Some(s.clone()),
                    },
                    FeatureValue::Bool(_) => Column {
                        feature: f.clone(),
                        value: None,
                    },
                };
                cols.insert(col);
            }
        }
        ColumnDictionary::from(cols.into_iter().collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, i: u32) -> &Column {
        &self.columns[i as usize]
    }

    pub fn index_of(&self, col: &Column) -> Option<u32> {
        self.index.get(col).copied()
    }

    /// Active columns of one vector. Values missing from the dictionary
    /// leave their feature all-zero.
    pub fn encode_one(&self, v: &FeatureVector) -> Vec<u32> {
        let mut row: Vec<u32> = v
            .active_pairs()
            .filter_map(|(f, value)| {
                let col = Column {
                    feature: f.clone(),
                    value: match value {
                        FeatureValue::Cat(s) => Some(s.clone()),
                        FeatureValue::Bool(_) => None,
                    },
                };
                self.index_of(&col)
            })
            .collect();
        row.sort_unstable();
        row
    }

    pub fn encode(&self, vectors: &[FeatureVector]) -> SparseMatrix {
        SparseMatrix {
            n_cols: self.len(),
            rows: vectors.iter().map(|v| self.encode_one(v)).collect(),
        }
    }

    /// The (feature, value) pairs an encoded row activates.
    pub fn decode(&self, row: &[u32]) -> Vec<(FeatureId, FeatureValue)> {
        row.iter()
            .map(|&i| {
                let c = self.column(i);
                let value = match &c.value {
                    Some(s) => FeatureValue::Cat(s.clone()),
                    None => FeatureValue::Bool(true),
                };
                (c.feature.clone(), value)
            })
            .collect()
    }

    /// Features owning at least one column, in column order.
    pub fn features(&self) -> Vec<FeatureId> {
        let mut out: Vec<FeatureId> = self.columns.iter().map(|c| c.feature.clone()).collect();
        out.dedup();
        out
    }
}

/// Builds the dictionary from `vectors` and encodes them with it.
pub fn encode(vectors: &[FeatureVector], selected: Option<&[FeatureId]>) -> (SparseMatrix, ColumnDictionary) {
    let dict = ColumnDictionary::build(vectors, selected);
    (dict.encode(vectors), dict)
}
