//! In-memory inverted index with the collection statistics BM25 needs.

mod persist;
pub(crate) mod varint;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use persist::{load_index, save_index, FORMAT_VERSION, INDEX_FILES};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::parallel::Pool;
use crate::tokenize::{tokenize, TokenizerConfig, TokenizerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub doc_count: u32,
    pub avg_doc_len: f64,
    pub total_tokens: u64,
}

impl IndexStats {
    pub fn from_lengths(lengths: &[u32]) -> Self {
        let total_tokens: u64 = lengths.iter().map(|&l| u64::from(l)).sum();
        let doc_count = lengths.len() as u32;
        let avg_doc_len = if doc_count > 0 { total_tokens as f64 / f64::from(doc_count) } else { 0.0 };
        Self { doc_count, avg_doc_len, total_tokens }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexOptions {
    /// Index `title + "\n" + body` rather than the body alone.
    pub include_title: bool,
    /// Worker threads for tokenization; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self { include_title: true, threads: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    dictionary: BTreeMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    doc_ids: Vec<String>,
    ordinals: HashMap<String, u32>,
    stats: IndexStats,
    tokenizer_fingerprint: String,
    include_title: bool,
    tokenizer_spec: Option<TokenizerSpec>,
}

const CHUNK_SIZE: usize = 2048;

/// The text that gets tokenized for `doc`.
pub fn indexed_text(doc: &Document, include_title: bool) -> String {
    if include_title {
        format!("{}\n{}", doc.title, doc.body)
    } else {
        doc.body.clone()
    }
}

/// Tokenizes and indexes a document stream. Ordinals follow stream order.
pub fn build_index<I>(docs: I, config: &TokenizerConfig, options: IndexOptions) -> Result<InvertedIndex>
where
    I: IntoIterator<Item = Result<Document>>,
{
    config.validate()?;
    let pool = Pool::new(options.threads)?;
    let mut builder = Builder::default();
    let mut chunk = Vec::with_capacity(CHUNK_SIZE);
    for doc in docs {
        chunk.push(doc?);
        if chunk.len() == CHUNK_SIZE {
            builder.add_chunk(&chunk, config, options, &pool)?;
            chunk.clear();
        }
    }
    builder.add_chunk(&chunk, config, options, &pool)?;
    if builder.doc_ids.is_empty() {
        return Err(Error::Input("cannot build an index from zero documents".into()));
    }
    let stats = IndexStats::from_lengths(&builder.doc_lengths);
    Ok(InvertedIndex {
        dictionary: builder.dictionary,
        doc_lengths: builder.doc_lengths,
        doc_ids: builder.doc_ids,
        ordinals: builder.ordinals,
        stats,
        tokenizer_fingerprint: config.fingerprint(),
        include_title: options.include_title,
        tokenizer_spec: None,
    })
}

#[derive(Default)]
struct Builder {
    dictionary: BTreeMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    doc_ids: Vec<String>,
    ordinals: HashMap<String, u32>,
}

impl Builder {
    fn add_chunk(
        &mut self,
        chunk: &[Document],
        config: &TokenizerConfig,
        options: IndexOptions,
        pool: &Pool,
    ) -> Result<()> {
        if chunk.is_empty() {
            return Ok(());
        }
        let tokenized: Vec<Vec<String>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|d| tokenize(&indexed_text(d, options.include_title), config))
                .collect::<Result<Vec<_>>>()
        })?;

        for (doc, tokens) in chunk.iter().zip(tokenized) {
            if doc.doc_id.is_empty() || doc.doc_id.contains(char::is_whitespace) {
                return Err(Error::Input(format!(
                    "document id {:?} must be non-empty and free of whitespace",
                    doc.doc_id
                )));
            }
            let ordinal =
                u32::try_from(self.doc_ids.len()).map_err(|_| Error::Input("more than u32::MAX documents".into()))?;
            if self.ordinals.insert(doc.doc_id.clone(), ordinal).is_some() {
                return Err(Error::DuplicateId(doc.doc_id.clone()));
            }
            self.doc_ids.push(doc.doc_id.clone());
            let length = u32::try_from(tokens.len()).map_err(|_| Error::Input("document too long".into()))?;
            self.doc_lengths.push(length);

            let mut tf: HashMap<String, u32> = HashMap::new();
            for t in tokens {
                *tf.entry(t).or_insert(0) += 1;
            }
            for (term, tf) in tf {
                self.dictionary.entry(term).or_default().push(Posting { doc: ordinal, tf });
            }
        }
        Ok(())
    }
}

impl InvertedIndex {
    pub fn postings(&self, term: &str) -> Option<&[Posting]> {
        self.dictionary.get(term).map(Vec::as_slice)
    }

    pub fn df(&self, term: &str) -> u32 {
        self.dictionary.get(term).map_or(0, |p| p.len() as u32)
    }

    /// Terms with their posting lists, in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.dictionary.iter().map(|(t, p)| (t.as_str(), p.as_slice()))
    }

    pub fn num_terms(&self) -> usize {
        self.dictionary.len()
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_len(&self, ordinal: u32) -> u32 {
        self.doc_lengths[ordinal as usize]
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn doc_id(&self, ordinal: u32) -> &str {
        &self.doc_ids[ordinal as usize]
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.ordinals.get(doc_id).copied()
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }

    pub fn tokenizer_fingerprint(&self) -> &str {
        &self.tokenizer_fingerprint
    }

    pub fn include_title(&self) -> bool {
        self.include_title
    }

    /// How to rebuild the query tokenizer, when recorded.
    pub fn tokenizer_spec(&self) -> Option<&TokenizerSpec> {
        self.tokenizer_spec.as_ref()
    }

    pub fn set_tokenizer_spec(&mut self, spec: Option<TokenizerSpec>) {
        self.tokenizer_spec = spec;
    }

    /// Rejects a query tokenizer that would produce different terms than the
    /// one the index was built with.
    pub fn check_tokenizer(&self, config: &TokenizerConfig) -> Result<()> {
        let query = config.fingerprint();
        if query != self.tokenizer_fingerprint {
            return Err(Error::TokenizerMismatch { index: self.tokenizer_fingerprint.clone(), query });
        }
        Ok(())
    }

    /// Full scan of the df / dl / total-token invariants.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.doc_ids.len();
        if self.doc_lengths.len() != n || self.ordinals.len() != n {
            return Err(Error::Invariant("document tables disagree in length".into()));
        }
        if self.stats != IndexStats::from_lengths(&self.doc_lengths) {
            return Err(Error::Invariant("collection statistics do not match document lengths".into()));
        }
        let mut tf_sums = vec![0u64; n];
        let mut total = 0u64;
        for (term, postings) in &self.dictionary {
            if postings.is_empty() {
                return Err(Error::Invariant(format!("term {term:?} has an empty posting list")));
            }
            let mut prev: Option<u32> = None;
            for p in postings {
                if p.tf == 0 || p.doc as usize >= n || prev.is_some_and(|q| q >= p.doc) {
                    return Err(Error::Invariant(format!("malformed posting list for term {term:?}")));
                }
                prev = Some(p.doc);
                tf_sums[p.doc as usize] += u64::from(p.tf);
                total += u64::from(p.tf);
            }
        }
        if let Some(d) = (0..n).find(|&d| tf_sums[d] != u64::from(self.doc_lengths[d])) {
            return Err(Error::Invariant(format!(
                "length of document {:?} does not match its postings",
                self.doc_ids[d]
            )));
        }
        if total != self.stats.total_tokens {
            return Err(Error::Invariant("posting frequencies do not sum to the token total".into()));
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        dictionary: BTreeMap<String, Vec<Posting>>,
        doc_lengths: Vec<u32>,
        doc_ids: Vec<String>,
        stats: IndexStats,
        tokenizer_fingerprint: String,
        include_title: bool,
        tokenizer_spec: Option<TokenizerSpec>,
    ) -> Result<Self> {
        let mut ordinals = HashMap::with_capacity(doc_ids.len());
        for (i, id) in doc_ids.iter().enumerate() {
            if ordinals.insert(id.clone(), i as u32).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let index = Self {
            dictionary,
            doc_lengths,
            doc_ids,
            ordinals,
            stats,
            tokenizer_fingerprint,
            include_title,
            tokenizer_spec,
        };
        index.check_consistency()?;
        Ok(index)
    }
}
