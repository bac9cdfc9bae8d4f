//! CoNLL-U sentences with the optional eleventh PARSEME column.
//!
//! [`SentenceParser`] consumes one line at a time, so callers holding a
//! multi-gigabyte corpus only keep the current sentence in memory.
//! Multiword-token ranges (`3-4`) and empty nodes (`3.1`) are kept verbatim
//! for writing but never become [`Token`]s.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Multiset;
use crate::tree::DepTree;

/// Coarse VMWE category. Sub-labels such as `LVC.full` and `LVC.cause`
/// collapse to [`Category::Lvc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "VID")]
    Vid,
    #[serde(rename = "LVC")]
    Lvc,
    #[serde(rename = "IRV")]
    Irv,
    #[serde(rename = "MVC")]
    Mvc,
    /// Any label outside of the four verbal categories (VPC, IAV, ...).
    #[serde(rename = "OTHER")]
    Other,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Vid,
        Category::Lvc,
        Category::Irv,
        Category::Mvc,
        Category::Other,
    ];

    pub fn from_label(label: &str) -> Category {
        let coarse = label.split('.').next().unwrap_or(label);
        match coarse {
            "VID" => Category::Vid,
            "LVC" => Category::Lvc,
            "IRV" => Category::Irv,
            "MVC" => Category::Mvc,
            _ => Category::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Vid => "VID",
            Category::Lvc => "LVC",
            Category::Irv => "IRV",
            Category::Mvc => "MVC",
            Category::Other => "OTHER",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One `index[:category]` entry of the VMWE column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MweTag {
    pub index: u32,
    pub category: Option<String>,
}

/// Content of the eleventh column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MweColumn {
    /// Ten-column file.
    Missing,
    /// `_`: the token was not annotated for VMWEs.
    Unannotated,
    /// `*`: annotated, no VMWE.
    NoVmwe,
    Tags(Vec<MweTag>),
}

impl MweColumn {
    fn parse(raw: &str, line: usize) -> Result<MweColumn> {
        match raw {
            "_" => Ok(MweColumn::Unannotated),
            "*" => Ok(MweColumn::NoVmwe),
            _ => {
                let mut tags = Vec::new();
                for part in raw.split(';') {
                    let (index, category) = match part.split_once(':') {
                        Some((idx, cat)) => (idx, Some(cat.to_string())),
                        None => (part, None),
                    };
                    let index = index.parse::<u32>().ok().filter(|&i| i > 0).ok_or_else(|| {
                        Error::Parse {
                            line,
                            message: format!("invalid VMWE annotation '{raw}'"),
                        }
                    })?;
                    tags.push(MweTag { index, category });
                }
                Ok(MweColumn::Tags(tags))
            }
        }
    }

    fn render(&self) -> String {
        match self {
            MweColumn::Missing | MweColumn::Unannotated => "_".to_string(),
            MweColumn::NoVmwe => "*".to_string(),
            MweColumn::Tags(tags) => render_tags(tags),
        }
    }
}

fn render_tags(tags: &[MweTag]) -> String {
    let mut out = String::new();
    for (i, tag) in tags.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        out.push_str(&tag.index.to_string());
        if let Some(cat) = &tag.category {
            out.push(':');
            out.push_str(cat);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position within the sentence.
    pub id: u32,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    /// Raw FEATS column; see [`Token::morph_feats`].
    pub feats: String,
    /// `None` when the HEAD column is `_`.
    pub head: Option<u32>,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
    pub mwe: MweColumn,
}

impl Token {
    /// The `key=value` morphological features, empty for `_`.
    pub fn morph_feats(&self) -> impl Iterator<Item = &str> {
        self.feats.split('|').filter(|f| !f.is_empty() && *f != "_")
    }

    fn columns(&self) -> [String; 10] {
        [
            self.id.to_string(),
            self.form.clone(),
            self.lemma.clone(),
            self.upos.clone(),
            self.xpos.clone(),
            self.feats.clone(),
            self.head.map_or_else(|| "_".to_string(), |h| h.to_string()),
            self.deprel.clone(),
            self.deps.clone(),
            self.misc.clone(),
        ]
    }
}

/// Layout entry used to reproduce the original line order on output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Row {
    Comment(String),
    /// Index into [`Sentence::tokens`].
    Word(usize),
    /// Multiword-token range or empty node, kept verbatim.
    Other(String),
}

/// A gold VMWE read from the annotation column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldVmwe {
    /// The per-sentence VMWE index used in the column.
    pub index: u32,
    /// Sorted token ids.
    pub token_ids: Vec<u32>,
    pub category: Category,
    /// Label as written, e.g. `LVC.full`.
    pub raw_category: String,
    pub lemmas: Multiset,
    pub pos: Multiset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub sent_id: String,
    pub rows: Vec<Row>,
    pub tokens: Vec<Token>,
    pub gold: Vec<GoldVmwe>,
    /// 10 or 11.
    pub n_columns: usize,
}

impl Sentence {
    pub fn token(&self, id: u32) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i as usize))
    }

    /// True when every token carries a numeric head.
    pub fn has_dependencies(&self) -> bool {
        !self.tokens.is_empty() && self.tokens.iter().all(|t| t.head.is_some())
    }

    /// True when the VMWE column is present and filled in on every token.
    pub fn is_annotated(&self) -> bool {
        self.n_columns == 11
            && self
                .tokens
                .iter()
                .all(|t| !matches!(t.mwe, MweColumn::Unannotated | MweColumn::Missing))
    }

    pub fn tree(&self) -> Option<DepTree> {
        DepTree::new(self).ok()
    }

    pub fn lemmas_of(&self, ids: &[u32]) -> Multiset {
        Multiset::new(ids.iter().filter_map(|&id| self.token(id)).map(|t| t.lemma.clone()))
    }

    pub fn pos_of(&self, ids: &[u32]) -> Multiset {
        Multiset::new(ids.iter().filter_map(|&id| self.token(id)).map(|t| t.upos.clone()))
    }

    /// Forms of the given tokens in linear order.
    pub fn surface_of(&self, ids: &[u32]) -> Vec<String> {
        let mut sorted: Vec<u32> = ids.to_vec();
        sorted.sort_unstable();
        sorted
            .iter()
            .filter_map(|&id| self.token(id))
            .map(|t| t.form.clone())
            .collect()
    }

    fn collect_gold(&mut self) -> Result<()> {
        let mut groups: BTreeMap<u32, (Vec<u32>, Option<String>)> = BTreeMap::new();
        for token in &self.tokens {
            if let MweColumn::Tags(tags) = &token.mwe {
                for tag in tags {
                    let entry = groups.entry(tag.index).or_default();
                    entry.0.push(token.id);
                    if let Some(cat) = &tag.category {
                        if entry.1.is_none() {
                            entry.1 = Some(cat.clone());
                        }
                    }
                }
            }
        }
        let mut gold = Vec::with_capacity(groups.len());
        for (index, (mut ids, category)) in groups {
            let raw = category.ok_or_else(|| Error::Structure {
                sent_id: self.sent_id.clone(),
                message: format!("VMWE {index} has no category"),
            })?;
            ids.sort_unstable();
            ids.dedup();
            gold.push(GoldVmwe {
                index,
                lemmas: self.lemmas_of(&ids),
                pos: self.pos_of(&ids),
                token_ids: ids,
                category: Category::from_label(&raw),
                raw_category: raw,
            });
        }
        self.gold = gold;
        Ok(())
    }
}

/// A VMWE predicted by the system, ready to be written as column 11.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedVmwe {
    pub sent_id: String,
    pub token_ids: Vec<u32>,
    /// Category label written on the first token.
    pub category: String,
    #[serde(default)]
    pub score: f64,
}

/// Incremental `.cupt` parser fed one line at a time.
#[derive(Debug, Default)]
pub struct SentenceParser {
    line_no: usize,
    ordinal: usize,
    block_start: usize,
    rows: Vec<Row>,
    tokens: Vec<Token>,
    sent_id: Option<String>,
    n_columns: Option<usize>,
}

impl SentenceParser {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds one line (without its terminator); returns a sentence when a
    /// blank line closes one.
    pub fn push_line(&mut self, line: &str) -> Result<Option<Sentence>> {
        self.line_no += 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            return self.flush();
        }
        if self.rows.is_empty() {
            self.block_start = self.line_no;
        }
        if line.starts_with('#') {
            if let Some(id) = comment_value(line, "sent_id") {
                self.sent_id = Some(id.to_string());
            } else if self.sent_id.is_none() {
                if let Some(src) = comment_value(line, "source_sent_id") {
                    if let Some(last) = src.split_whitespace().last() {
                        self.sent_id = Some(last.to_string());
                    }
                }
            }
            self.rows.push(Row::Comment(line.to_string()));
            return Ok(None);
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 && cols.len() != 11 {
            return Err(self.err(format!("expected 10 or 11 columns, found {}", cols.len())));
        }
        match self.n_columns {
            None => self.n_columns = Some(cols.len()),
            Some(n) if n != cols.len() => {
                return Err(self.err(format!(
                    "column count changes within a sentence ({n} vs {})",
                    cols.len()
                )))
            }
            _ => {}
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            self.rows.push(Row::Other(line.to_string()));
            return Ok(None);
        }
        let id: u32 = cols[0]
            .parse()
            .map_err(|_| self.err(format!("invalid token id '{}'", cols[0])))?;
        if id as usize != self.tokens.len() + 1 {
            return Err(self.err(format!(
                "token id {id} breaks the sequence (expected {})",
                self.tokens.len() + 1
            )));
        }
        let head = match cols[6] {
            "_" => None,
            h => Some(
                h.parse::<u32>()
                    .map_err(|_| self.err(format!("invalid head '{h}'")))?,
            ),
        };
        let mwe = if cols.len() == 11 {
            MweColumn::parse(cols[10], self.line_no)?
        } else {
            MweColumn::Missing
        };
        self.rows.push(Row::Word(self.tokens.len()));
        self.tokens.push(Token {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
            mwe,
        });
        Ok(None)
    }

    /// Closes a trailing sentence not followed by a blank line.
    pub fn finish(&mut self) -> Result<Option<Sentence>> {
        self.flush()
    }

    fn err(&self, message: String) -> Error {
        Error::Parse {
            line: self.line_no,
            message,
        }
    }

    fn flush(&mut self) -> Result<Option<Sentence>> {
        if self.rows.is_empty() {
            return Ok(None);
        }
        self.ordinal += 1;
        let sent_id = self
            .sent_id
            .take()
            .unwrap_or_else(|| format!("{}", self.ordinal));
        let mut sentence = Sentence {
            sent_id,
            rows: core::mem::take(&mut self.rows),
            tokens: core::mem::take(&mut self.tokens),
            gold: Vec::new(),
            n_columns: self.n_columns.take().unwrap_or(10),
        };
        // Partially headed sentences are kept but flagged via has_dependencies().
        if sentence.has_dependencies() {
            DepTree::new(&sentence)?;
        }
        sentence.collect_gold().map_err(|e| match e {
            Error::Structure { sent_id, message } => Error::Structure {
                sent_id,
                message: format!("{message} (block starting at line {})", self.block_start),
            },
            other => other,
        })?;
        Ok(Some(sentence))
    }
}

fn comment_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.trim_start_matches('#').trim_start();
    let rest = rest.strip_prefix(key)?;
    let rest = rest.trim_start().strip_prefix('=')?;
    Some(rest.trim())
}

/// Parses a whole `.cupt` / CoNLL-U document held in memory.
pub fn parse_cupt(source: &str) -> Result<Vec<Sentence>> {
    let mut parser = SentenceParser::new();
    let mut out = Vec::new();
    for line in source.split('\n') {
        if let Some(s) = parser.push_line(line)? {
            out.push(s);
        }
    }
    if let Some(s) = parser.finish()? {
        out.push(s);
    }
    Ok(out)
}

/// Column-11 rewrite computed from predictions.
#[derive(Debug, Default, Clone)]
pub struct PredictionColumns {
    per_sentence: BTreeMap<String, BTreeMap<u32, Vec<MweTag>>>,
}

impl PredictionColumns {
    /// Validates predictions against the sentences and numbers them per
    /// sentence in order of their first token.
    pub fn new(sentences: &[Sentence], predictions: &[PredictedVmwe]) -> Result<Self> {
        let mut by_id: BTreeMap<&str, &Sentence> = BTreeMap::new();
        for s in sentences {
            by_id.entry(s.sent_id.as_str()).or_insert(s);
        }
        let mut grouped: BTreeMap<&str, Vec<(Vec<u32>, &str)>> = BTreeMap::new();
        for p in predictions {
            let sentence = by_id.get(p.sent_id.as_str()).ok_or_else(|| Error::UnknownReference {
                sent_id: p.sent_id.clone(),
                message: "prediction for an unknown sentence".to_string(),
            })?;
            if p.token_ids.is_empty() {
                return Err(Error::UnknownReference {
                    sent_id: p.sent_id.clone(),
                    message: "prediction without tokens".to_string(),
                });
            }
            for &id in &p.token_ids {
                if sentence.token(id).is_none() {
                    return Err(Error::UnknownReference {
                        sent_id: p.sent_id.clone(),
                        message: format!("prediction references unknown token {id}"),
                    });
                }
            }
            let mut ids = p.token_ids.clone();
            ids.sort_unstable();
            ids.dedup();
            grouped
                .entry(sentence.sent_id.as_str())
                .or_default()
                .push((ids, p.category.as_str()));
        }
        let mut per_sentence = BTreeMap::new();
        for (sent_id, mut preds) in grouped {
            preds.sort();
            preds.dedup_by(|a, b| a.0 == b.0);
            let mut columns: BTreeMap<u32, Vec<MweTag>> = BTreeMap::new();
            for (n, (ids, category)) in preds.iter().enumerate() {
                let index = n as u32 + 1;
                for (i, &id) in ids.iter().enumerate() {
                    columns.entry(id).or_default().push(MweTag {
                        index,
                        category: (i == 0).then(|| category.to_string()),
                    });
                }
            }
            per_sentence.insert(sent_id.to_string(), columns);
        }
        Ok(Self { per_sentence })
    }

    fn column_for(&self, sent_id: &str, token: u32) -> String {
        match self.per_sentence.get(sent_id).and_then(|m| m.get(&token)) {
            Some(tags) => render_tags(tags),
            None => "*".to_string(),
        }
    }
}

/// Appends one sentence in `.cupt` layout (LF line ends, blank line after).
pub fn write_sentence(out: &mut String, sentence: &Sentence, predictions: Option<&PredictionColumns>) {
    let eleven = predictions.is_some() || sentence.n_columns == 11;
    for row in &sentence.rows {
        match row {
            Row::Comment(c) => out.push_str(c),
            Row::Other(raw) => {
                out.push_str(raw);
                if predictions.is_some() && raw.split('\t').count() == 10 {
                    out.push_str("\t*");
                }
            }
            Row::Word(i) => {
                let token = &sentence.tokens[*i];
                for (n, col) in token.columns().iter().enumerate() {
                    if n > 0 {
                        out.push('\t');
                    }
                    out.push_str(col);
                }
                if eleven {
                    out.push('\t');
                    match predictions {
                        Some(p) => out.push_str(&p.column_for(&sentence.sent_id, token.id)),
                        None => out.push_str(&token.mwe.render()),
                    }
                }
            }
        }
        out.push('\n');
    }
    out.push('\n');
}

/// Serializes sentences, rewriting the VMWE column when predictions are given.
pub fn write_cupt(sentences: &[Sentence], predictions: Option<&[PredictedVmwe]>) -> Result<String> {
    let columns = predictions
        .map(|p| PredictionColumns::new(sentences, p))
        .transpose()?;
    let mut out = String::new();
    for s in sentences {
        write_sentence(&mut out, s, columns.as_ref());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const TWO: &str = "# sent_id = s1\n\
1\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\t1:LVC.full\n\
2\tmesure\tmesure\tNOUN\t_\t_\t1\tobj\t_\t_\t1\n\n";

    #[test]
    fn minimal_lvc() {
        let s = parse_cupt(TWO).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].sent_id, "s1");
        assert_eq!(s[0].gold.len(), 1);
        let g = &s[0].gold[0];
        assert_eq!(g.token_ids, vec![1, 2]);
        assert_eq!(g.category, Category::Lvc);
        assert_eq!(g.raw_category, "LVC.full");
        assert_eq!(g.lemmas.items(), ["mesure", "prendre"]);
        assert!(s[0].is_annotated());
    }

    #[test]
    fn stars_mean_no_vmwe() {
        let src = TWO.replace("1:LVC.full", "*").replace("\t1\n", "\t*\n");
        let s = parse_cupt(&src).unwrap();
        assert!(s[0].gold.is_empty());
        assert!(s[0].is_annotated());
    }

    #[test]
    fn underscore_means_unannotated() {
        let src = TWO.replace("1:LVC.full", "_").replace("\t1\n", "\t_\n");
        let s = parse_cupt(&src).unwrap();
        assert!(!s[0].is_annotated());
        assert!(s[0].gold.is_empty());
    }

    #[test]
    fn wrong_column_count_reports_line() {
        let src = "# sent_id = a\n1\tx\tx\tX\t_\t_\t0\troot\t_\n";
        match parse_cupt(src) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cycle_is_structural_error() {
        let src = "# sent_id = cyc\n\
1\ta\ta\tX\t_\t_\t2\tdep\t_\t_\n\
2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n\n";
        match parse_cupt(src) {
            Err(Error::Structure { sent_id, .. }) => assert_eq!(sent_id, "cyc"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ranges_and_empty_nodes_are_not_tokens() {
        let src = "# sent_id = r\n\
1-2\tau\t_\t_\t_\t_\t_\t_\t_\t_\t*\n\
1\tà\tà\tADP\t_\t_\t2\tcase\t_\t_\t*\n\
2\tle\tle\tDET\t_\t_\t3\tdet\t_\t_\t*\n\
3\tbout\tbout\tNOUN\t_\t_\t0\troot\t_\t_\t*\n\
3.1\tx\tx\tX\t_\t_\t_\t_\t3:dep\t_\t*\n\n";
        let s = parse_cupt(src).unwrap();
        assert_eq!(s[0].tokens.len(), 3);
        assert!(s[0].has_dependencies());
        assert_eq!(write_cupt(&s, None).unwrap(), src);
    }

    #[test]
    fn missing_heads_flag_sentence() {
        let src = "1\ta\ta\tX\t_\t_\t_\t_\t_\t_\n2\tb\tb\tX\t_\t_\t_\t_\t_\t_\n";
        let s = parse_cupt(src).unwrap();
        assert!(!s[0].has_dependencies());
        assert_eq!(s[0].sent_id, "1");
    }

    #[test]
    fn crlf_accepted_lf_emitted() {
        let crlf = TWO.replace('\n', "\r\n");
        let s = parse_cupt(&crlf).unwrap();
        assert_eq!(write_cupt(&s, None).unwrap(), TWO);
    }

    #[test]
    fn predictions_rewrite_column() {
        let src = "# sent_id = p\n\
1\tIl\til\tPRON\t_\t_\t2\tnsubj\t_\t_\t*\n\
2\tprend\tprendre\tVERB\t_\t_\t0\troot\t_\t_\t*\n\
3\tdes\tun\tDET\t_\t_\t5\tdet\t_\t_\t*\n\
4\tgrandes\tgrand\tADJ\t_\t_\t5\tamod\t_\t_\t*\n\
5\tmesures\tmesure\tNOUN\t_\t_\t2\tobj\t_\t_\t*\n\n";
        let s = parse_cupt(src).unwrap();
        let pred = PredictedVmwe {
            sent_id: "p".into(),
            token_ids: vec![5, 2],
            category: "VID".into(),
            score: 1.0,
        };
        let out = write_cupt(&s, Some(&[pred])).unwrap();
        let col: Vec<&str> = out
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .map(|l| l.rsplit('\t').next().unwrap())
            .collect();
        assert_eq!(col, ["*", "1:VID", "*", "*", "1"]);

        let empty = write_cupt(&s, Some(&[])).unwrap();
        assert!(empty
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .all(|l| l.ends_with("\t*")));
    }

    #[test]
    fn prediction_on_unknown_token_fails() {
        let s = parse_cupt(TWO).unwrap();
        let pred = PredictedVmwe {
            sent_id: "s1".into(),
            token_ids: vec![1, 9],
            category: "VID".into(),
            score: 0.0,
        };
        assert!(matches!(
            write_cupt(&s, Some(&[pred])),
            Err(Error::UnknownReference { .. })
        ));
    }

    #[test]
    fn category_normalization() {
        assert_eq!(Category::from_label("LVC.cause"), Category::Lvc);
        assert_eq!(Category::from_label("VID"), Category::Vid);
        assert_eq!(Category::from_label("VPC.full"), Category::Other);
    }
}
