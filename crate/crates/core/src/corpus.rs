//! Corpus, topic and relevance-judgment loaders.
//!
//! Corpora are JSONL (`{"id", "title", "text"}` per line), topics are
//! two-column TSV and judgments use the four-column TREC qrels layout.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub body: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        Self { doc_id: doc_id.into(), title: title.into(), body: body.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub query_id: String,
    pub text: String,
}

impl Query {
    pub fn new(query_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self { query_id: query_id.into(), text: text.into() }
    }
}

#[derive(Deserialize, Serialize)]
struct DocRecord<'a> {
    #[serde(alias = "docid")]
    id: std::borrow::Cow<'a, str>,
    #[serde(default)]
    title: std::borrow::Cow<'a, str>,
    text: std::borrow::Cow<'a, str>,
}

/// Streaming JSONL corpus reader. Holds one line in memory at a time plus
/// the set of ids seen so far.
pub struct CorpusReader<R> {
    reader: R,
    source_name: String,
    line_no: usize,
    buf: Vec<u8>,
    seen: HashSet<String>,
    done: bool,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, source_name: impl Into<String>) -> Self {
        Self { reader, source_name: source_name.into(), line_no: 0, buf: Vec::new(), seen: HashSet::new(), done: false }
    }

    fn next_document(&mut self) -> Result<Option<Document>> {
        loop {
            self.buf.clear();
            let n = self.reader.read_until(b'\n', &mut self.buf).map_err(|e| Error::io(&self.source_name, e))?;
            if n == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let line = std::str::from_utf8(&self.buf)
                .map_err(|e| Error::format(&self.source_name, self.line_no, format!("invalid UTF-8: {e}")))?;
            let line = line.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            let record: DocRecord<'_> = serde_json::from_str(line)
                .map_err(|e| Error::format(&self.source_name, self.line_no, format!("malformed JSON: {e}")))?;
            if record.id.is_empty() {
                return Err(Error::format(&self.source_name, self.line_no, "empty document id"));
            }
            if !self.seen.insert(record.id.to_string()) {
                return Err(Error::DuplicateId(record.id.into_owned()));
            }
            return Ok(Some(Document {
                doc_id: record.id.into_owned(),
                title: record.title.into_owned(),
                body: record.text.into_owned(),
            }));
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_document() {
            Ok(Some(doc)) => Some(Ok(doc)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Opens a JSONL corpus for streaming.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = open(path)?;
    Ok(CorpusReader::new(BufReader::new(file), path.display().to_string()))
}

/// Writes documents as JSONL in the same layout [`load_corpus`] reads.
pub fn write_corpus<'a, W: Write>(docs: impl IntoIterator<Item = &'a Document>, mut out: W) -> std::io::Result<()> {
    for doc in docs {
        let record = DocRecord {
            id: doc.doc_id.as_str().into(),
            title: doc.title.as_str().into(),
            text: doc.body.as_str().into(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn load_queries(path: impl AsRef<Path>) -> Result<Vec<Query>> {
    let path = path.as_ref();
    parse_queries(BufReader::new(open(path)?), &path.display().to_string())
}

pub fn parse_queries<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<Query>> {
    let mut queries = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::format(source_name, line_no, "invalid UTF-8"),
            _ => Error::io(source_name, e),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) =
            line.split_once('\t').ok_or_else(|| Error::format(source_name, line_no, "expected `query_id<TAB>text`"))?;
        if id.is_empty() {
            return Err(Error::format(source_name, line_no, "empty query id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        queries.push(Query::new(id, text));
    }
    Ok(queries)
}

/// Relevance judgments, `query_id -> doc_id -> grade`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a judgment, returning the previous grade for the pair if any.
    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) -> Option<u32> {
        self.judgments.entry(query_id.to_string()).or_default().insert(doc_id.to_string(), grade)
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> Option<u32> {
        self.judgments.get(query_id)?.get(doc_id).copied()
    }

    pub fn is_relevant(&self, query_id: &str, doc_id: &str, threshold: u32) -> bool {
        self.grade(query_id, doc_id).is_some_and(|g| g >= threshold)
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.judgments.contains_key(query_id)
    }

    pub fn num_relevant(&self, query_id: &str, threshold: u32) -> usize {
        self.judgments.get(query_id).map_or(0, |docs| docs.values().filter(|&&g| g >= threshold).count())
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn judgments(&self, query_id: &str) -> impl Iterator<Item = (&str, u32)> {
        self.judgments.get(query_id).into_iter().flat_map(|docs| docs.iter().map(|(d, &g)| (d.as_str(), g)))
    }

    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// Loads TREC qrels. Later duplicates override earlier ones; each override is
/// logged at `warn` level.
pub fn load_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    let (qrels, warnings) = parse_qrels(BufReader::new(open(path)?), &path.display().to_string())?;
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(qrels)
}

/// Parses TREC qrels, returning the judgments and one warning per overridden pair.
pub fn parse_qrels<R: BufRead>(reader: R, source_name: &str) -> Result<(Qrels, Vec<String>)> {
    let mut qrels = Qrels::new();
    let mut warnings = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::format(source_name, line_no, "invalid UTF-8"),
            _ => Error::io(source_name, e),
        })?;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            continue;
        }
        if cols.len() != 4 {
            return Err(Error::format(
                source_name,
                line_no,
                format!("expected 4 columns `query_id 0 doc_id grade`, found {}", cols.len()),
            ));
        }
        let grade: u32 = cols[3].parse().map_err(|_| {
            Error::format(source_name, line_no, format!("grade {:?} is not a non-negative integer", cols[3]))
        })?;
        if let Some(prev) = qrels.insert(cols[0], cols[2], grade) {
            warnings.push(format!(
                "{source_name}:{line_no}: judgment for ({}, {}) overrides earlier grade {prev} with {grade}",
                cols[0], cols[2]
            ));
        }
    }
    Ok((qrels, warnings))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })
}
