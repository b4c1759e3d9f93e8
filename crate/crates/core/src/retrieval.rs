//! BM25 scoring, top-k search, and TREC run files.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Query;
use crate::error::{Error, Result};
use crate::index::{IndexStats, InvertedIndex};
use crate::parallel::Pool;
use crate::tokenize::{tokenize, TokenizerConfig};

pub const DEFAULT_K: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 0.9, b: 0.4 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self> {
        let p = Self { k1, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 >= 0.0 && self.k1.is_finite()) {
            return Err(Error::Config(format!("k1 must be a finite value >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::Config(format!("b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`; never negative.
pub fn idf(df: u32, doc_count: u32) -> f64 {
    let (df, n) = (f64::from(df), f64::from(doc_count));
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// One term's BM25 contribution for one document (no `k1 + 1` factor).
pub fn bm25_term_score(tf: u32, df: u32, dl: u32, params: &Bm25Params, stats: &IndexStats) -> Result<f64> {
    if df == 0 || df > stats.doc_count {
        return Err(Error::Contract(format!("document frequency {df} outside 1..={}", stats.doc_count)));
    }
    if stats.avg_doc_len.is_nan() || stats.avg_doc_len <= 0.0 {
        return Err(Error::Contract("average document length must be positive".into()));
    }
    Ok(score_unchecked(tf, idf(df, stats.doc_count), dl, params, stats.avg_doc_len))
}

#[inline]
fn score_unchecked(tf: u32, idf: f64, dl: u32, params: &Bm25Params, avgdl: f64) -> f64 {
    if tf == 0 {
        return 0.0;
    }
    let tf = f64::from(tf);
    let norm = params.k1 * (1.0 - params.b + params.b * f64::from(dl) / avgdl);
    idf * tf / (tf + norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
}

/// Descending score, then ascending doc id.
pub fn rank_order(a_score: f64, a_id: &str, b_score: f64, b_id: &str) -> Ordering {
    b_score.total_cmp(&a_score).then_with(|| a_id.cmp(b_id))
}

/// Sorts `(doc_id, score)` pairs by [`rank_order`], keeps the best `k`, and
/// assigns ranks from 1.
pub fn top_k(mut scored: Vec<(String, f64)>, k: usize) -> Vec<ScoredDoc> {
    let cmp = |a: &(String, f64), b: &(String, f64)| rank_order(a.1, &a.0, b.1, &b.0);
    if k == 0 {
        return Vec::new();
    }
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, cmp);
        scored.truncate(k);
    }
    scored.sort_unstable_by(cmp);
    scored.into_iter().enumerate().map(|(i, (doc_id, score))| ScoredDoc { doc_id, score, rank: i + 1 }).collect()
}

/// Scores every document sharing a term with `query_text` and returns the top `k`.
pub fn search(
    index: &InvertedIndex,
    query_text: &str,
    config: &TokenizerConfig,
    params: &Bm25Params,
    k: usize,
) -> Result<Vec<ScoredDoc>> {
    index.check_tokenizer(config)?;
    params.validate()?;
    let tokens = tokenize(query_text, config)?;
    Ok(score_tokens(index, tokens, params, k))
}

fn score_tokens(index: &InvertedIndex, mut tokens: Vec<String>, params: &Bm25Params, k: usize) -> Vec<ScoredDoc> {
    // Term-at-a-time in lexicographic term order keeps float summation fixed.
    tokens.sort_unstable();
    let stats = index.stats();
    let mut acc: Vec<f64> = Vec::new();
    let mut touched: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut j = i + 1;
        while j < tokens.len() && tokens[j] == tokens[i] {
            j += 1;
        }
        let multiplicity = (j - i) as f64;
        if let Some(postings) = index.postings(&tokens[i]) {
            if acc.is_empty() {
                acc = vec![0.0; index.num_docs()];
            }
            let w = idf(postings.len() as u32, stats.doc_count);
            for p in postings {
                let s = score_unchecked(p.tf, w, index.doc_len(p.doc), params, stats.avg_doc_len);
                let slot = &mut acc[p.doc as usize];
                // Every posting adds a strictly positive amount, so a zero
                // slot means the document has not been seen yet.
                if *slot == 0.0 {
                    touched.push(p.doc);
                }
                *slot += multiplicity * s;
            }
        }
        i = j;
    }
    let scored = touched.into_iter().map(|d| (index.doc_id(d).to_string(), acc[d as usize])).collect();
    top_k(scored, k)
}

/// A ranked list per query, in query order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunFile {
    pub tag: String,
    pub queries: Vec<(String, Vec<ScoredDoc>)>,
}

impl RunFile {
    pub fn new(tag: impl Into<String>) -> Self {
        Self { tag: tag.into(), queries: Vec::new() }
    }

    pub fn get(&self, query_id: &str) -> Option<&[ScoredDoc]> {
        self.queries.iter().find(|(q, _)| q == query_id).map(|(_, d)| d.as_slice())
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// `query_id Q0 doc_id rank score tag`, score to 6 decimals.
    pub fn write_trec<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (qid, docs) in &self.queries {
            for d in docs {
                writeln!(out, "{qid} Q0 {} {} {:.6} {}", d.doc_id, d.rank, d.score, self.tag)?;
            }
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_trec(BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::io(path, e),
        })?;
        Self::read_trec(BufReader::new(file), &path.display().to_string())
    }

    /// Parses a run file. Query order follows first appearance; within a query
    /// rows keep file order. A file with several tags keeps the first.
    pub fn read_trec<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut run = RunFile::default();
        let mut tag: Option<String> = None;
        let mut position: std::collections::HashMap<String, usize> = Default::default();
        for (n, line) in reader.lines().enumerate() {
            let line_no = n + 1;
            let line = line.map_err(|e| Error::format(source_name, line_no, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 6 {
                return Err(Error::format(source_name, line_no, format!("expected 6 columns, found {}", cols.len())));
            }
            let rank: usize =
                cols[3].parse().map_err(|_| Error::format(source_name, line_no, format!("bad rank {:?}", cols[3])))?;
            let score: f64 =
                cols[4].parse().map_err(|_| Error::format(source_name, line_no, format!("bad score {:?}", cols[4])))?;
            if !score.is_finite() {
                return Err(Error::format(source_name, line_no, "score is not finite"));
            }
            tag.get_or_insert_with(|| cols[5].to_string());
            let slot = *position.entry(cols[0].to_string()).or_insert_with(|| {
                run.queries.push((cols[0].to_string(), Vec::new()));
                run.queries.len() - 1
            });
            run.queries[slot].1.push(ScoredDoc { doc_id: cols[2].to_string(), score, rank });
        }
        run.tag = tag.unwrap_or_default();
        Ok(run)
    }
}

/// Runs every query through [`search`], possibly in parallel; output keeps
/// input order and records queries with no hits as empty lists.
pub fn run_queries(
    index: &InvertedIndex,
    queries: &[Query],
    config: &TokenizerConfig,
    params: &Bm25Params,
    k: usize,
    run_tag: &str,
    threads: Option<usize>,
) -> Result<RunFile> {
    index.check_tokenizer(config)?;
    params.validate()?;
    let pool = Pool::new(threads)?;
    let results: Vec<Result<Vec<ScoredDoc>>> = pool.install(|| {
        queries.par_iter().map(|q| tokenize(&q.text, config).map(|t| score_tokens(index, t, params, k))).collect()
    });
    let mut run = RunFile::new(run_tag);
    for (q, r) in queries.iter().zip(results) {
        run.queries.push((q.query_id.clone(), r?));
    }
    Ok(run)
}
