//! File formats: streaming `.cupt` reading, JSON artifacts with a
//! fingerprint envelope, JSONL with a header line, and TSV matrices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use vmwe_core::corpus::SentenceParser;
use vmwe_core::features::{ColumnDictionary, SparseMatrix};
use vmwe_core::Sentence;

/// Iterates over the sentences of a `.cupt` stream, holding one sentence
/// in memory at a time.
pub struct CuptReader<R> {
    lines: std::io::Lines<R>,
    parser: SentenceParser,
    done: bool,
}

impl<R: BufRead> CuptReader<R> {
    pub fn new(reader: R) -> Self {
        Self {
            lines: reader.lines(),
            parser: SentenceParser::new(),
            done: false,
        }
    }
}

impl<R: BufRead> Iterator for CuptReader<R> {
    type Item = Result<Sentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        for line in self.lines.by_ref() {
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            };
            match self.parser.push_line(&line) {
                Ok(Some(s)) => return Some(Ok(s)),
                Ok(None) => {}
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            }
        }
        self.done = true;
        self.parser.finish().map_err(Into::into).transpose()
    }
}

pub fn open_cupt(path: &Path) -> Result<CuptReader<BufReader<File>>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(CuptReader::new(BufReader::new(f)))
}

pub fn read_cupt(path: &Path) -> Result<Vec<Sentence>> {
    open_cupt(path)?
        .collect::<Result<Vec<_>>>()
        .with_context(|| format!("while reading {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let mut f = BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?);
    let mut hasher = Sha256::new();
    std::io::copy(&mut f, &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

#[derive(Serialize, Deserialize)]
pub struct Envelope<T> {
    pub kind: String,
    pub fingerprint: String,
    pub data: T,
}

pub fn write_json<T: Serialize>(path: &Path, kind: &str, fingerprint: &str, data: &T) -> Result<()> {
    let mut w = create(path)?;
    let env = Envelope {
        kind: kind.to_string(),
        fingerprint: fingerprint.to_string(),
        data,
    };
    serde_json::to_writer_pretty(&mut w, &env)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Envelope<T>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let env: Envelope<T> = serde_json::from_reader(BufReader::new(f))
        .with_context(|| format!("{} is not a valid {kind} file", path.display()))?;
    if env.kind != kind {
        bail!("{} holds a '{}' artifact, expected '{kind}'", path.display(), env.kind);
    }
    Ok(env)
}

#[derive(Serialize, Deserialize)]
struct Header {
    kind: String,
    artifact: String,
    fingerprint: String,
}

pub fn write_jsonl<T: Serialize>(path: &Path, artifact: &str, fingerprint: &str, records: &[T]) -> Result<()> {
    let mut w = create(path)?;
    let header = Header {
        kind: "header".into(),
        artifact: artifact.into(),
        fingerprint: fingerprint.into(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Records of a JSONL file and the fingerprint of its header, if any.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<(Option<String>, Vec<T>)> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut fingerprint = None;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if let Ok(h) = serde_json::from_str::<Header>(&line) {
                if h.kind == "header" {
                    fingerprint = Some(h.fingerprint);
                    continue;
                }
            }
        }
        let rec = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed record", path.display(), i + 1))?;
        out.push(rec);
    }
    Ok((fingerprint, out))
}

/// Encoded matrix as TSV: a fingerprint comment, a header of column names,
/// then one row per candidate with "1" / "0", or "" where the feature is
/// absent from the candidate.
pub fn write_matrix_tsv(
    path: &Path,
    fingerprint: &str,
    dict: &ColumnDictionary,
    matrix: &SparseMatrix,
    present: &[Vec<bool>],
    labels: &[Option<bool>],
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# fingerprint={fingerprint}")?;
    let names: Vec<String> = dict.columns().iter().map(|c| c.name()).collect();
    writeln!(w, "label\t{}", names.join("\t"))?;
    for ((row, has), label) in matrix.rows.iter().zip(present).zip(labels) {
        let mut cells = vec![String::new(); matrix.n_cols];
        for (c, cell) in cells.iter_mut().enumerate() {
            if has[c] {
                *cell = "0".into();
            }
        }
        for &c in row {
            cells[c as usize] = "1".into();
        }
        let l = match label {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        writeln!(w, "{l}\t{}", cells.join("\t"))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}
