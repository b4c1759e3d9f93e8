//! Independent oracles and random generators shared by the integration tests.
//!
//! The oracles recompute results from first principles (full scans, exhaustive
//! enumeration) without touching the index or the incremental trainer.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use lexmatch::index::indexed_text;
use lexmatch::retrieval::{top_k, RunFile, ScoredDoc};
use lexmatch::tokenize::{tokenize, TokenizerConfig};
use lexmatch::{Bm25Params, Document, Query};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

// ---------------------------------------------------------------- BM25 oracle

/// Scores every document against `query` by scanning its tokens, then sorts
/// all positive scores by (score desc, doc_id asc) and keeps `k`.
pub struct BruteForce {
    docs: Vec<(String, HashMap<String, u32>, u32)>,
    df: HashMap<String, u32>,
    avgdl: f64,
}

impl BruteForce {
    pub fn new(docs: &[Document], config: &TokenizerConfig, include_title: bool) -> Self {
        let mut out = Vec::with_capacity(docs.len());
        let mut df: HashMap<String, u32> = HashMap::new();
        let mut total = 0u64;
        for d in docs {
            let tokens = tokenize(&indexed_text(d, include_title), config).unwrap();
            let mut tf: HashMap<String, u32> = HashMap::new();
            for t in &tokens {
                *tf.entry(t.clone()).or_default() += 1;
            }
            for t in tf.keys() {
                *df.entry(t.clone()).or_default() += 1;
            }
            total += tokens.len() as u64;
            out.push((d.doc_id.clone(), tf, tokens.len() as u32));
        }
        let avgdl = total as f64 / docs.len() as f64;
        Self { docs: out, df, avgdl }
    }

    pub fn search(&self, query: &str, config: &TokenizerConfig, params: &Bm25Params, k: usize) -> Vec<(String, f64)> {
        let n = self.docs.len() as f64;
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokenize(query, config).unwrap() {
            *counts.entry(t).or_default() += 1;
        }
        let mut scored = Vec::new();
        for (id, tf, dl) in &self.docs {
            let mut score = 0.0;
            let mut matched = false;
            // Lexicographic term order, the documented accumulation order.
            for (term, &m) in &counts {
                let Some(&f) = tf.get(term) else { continue };
                matched = true;
                let df = f64::from(self.df[term]);
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let f = f64::from(f);
                let norm = params.k1 * (1.0 - params.b + params.b * f64::from(*dl) / self.avgdl);
                score += f64::from(m) * (idf * f / (f + norm));
            }
            if matched {
                scored.push((id.clone(), score));
            }
        }
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }
}

// ------------------------------------------------------------- trainer oracle

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMerge {
    pub left: String,
    pub right: String,
    pub merged: String,
}

/// (pair, freq, score numerator, score denominator, merged symbol)
type Candidate<'a> = ((&'a str, &'a str), u64, u128, u128, String);

/// Exhaustive WordPiece training: at each step every adjacent pair in every
/// word is enumerated and scored from scratch.
pub fn oracle_train(
    word_counts: &BTreeMap<String, u64>,
    vocab_size: usize,
    min_pair_freq: u64,
) -> (Vec<String>, Vec<OracleMerge>) {
    let mut words: Vec<(Vec<String>, u64)> = word_counts
        .iter()
        .map(|(w, &c)| {
            let syms =
                w.chars().enumerate().map(|(i, ch)| if i == 0 { ch.to_string() } else { format!("##{ch}") }).collect();
            (syms, c)
        })
        .collect();

    let mut plain: Vec<String> = word_counts.keys().flat_map(|w| w.chars().map(|c| c.to_string())).collect();
    plain.sort();
    plain.dedup();
    let mut cont: Vec<String> = word_counts.keys().flat_map(|w| w.chars().skip(1).map(|c| format!("##{c}"))).collect();
    cont.sort();
    cont.dedup();
    let mut vocab = vec!["[UNK]".to_string()];
    vocab.extend(plain);
    vocab.extend(cont);

    let mut merges = Vec::new();
    while vocab.len() < vocab_size {
        let mut sym_freq: HashMap<&str, u64> = HashMap::new();
        let mut pair_freq: HashMap<(&str, &str), u64> = HashMap::new();
        for (syms, c) in &words {
            for s in syms {
                *sym_freq.entry(s).or_default() += c;
            }
            for w in syms.windows(2) {
                *pair_freq.entry((&w[0], &w[1])).or_default() += c;
            }
        }
        let mut best: Option<Candidate> = None;
        for (&(a, b), &f) in &pair_freq {
            if f < min_pair_freq {
                continue;
            }
            let den = u128::from(sym_freq[a]) * u128::from(sym_freq[b]);
            let merged = format!("{a}{}", b.strip_prefix("##").unwrap_or(b));
            let better = match &best {
                None => true,
                Some((bp, bf, bnum, bden, bm)) => {
                    let lhs = u128::from(f) * bden;
                    let rhs = bnum * den;
                    if lhs != rhs {
                        lhs > rhs
                    } else if f != *bf {
                        f > *bf
                    } else if merged != *bm {
                        merged < *bm
                    } else {
                        (a, b) < *bp
                    }
                }
            };
            if better {
                best = Some(((a, b), f, u128::from(f), den, merged));
            }
        }
        let Some(((a, b), _, _, _, merged)) = best else {
            break;
        };
        let (a, b) = (a.to_string(), b.to_string());
        for (syms, _) in &mut words {
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == a && syms[i + 1] == b {
                    out.push(merged.clone());
                    i += 2;
                } else {
                    out.push(syms[i].clone());
                    i += 1;
                }
            }
            *syms = out;
        }
        if !vocab.contains(&merged) {
            vocab.push(merged.clone());
        }
        merges.push(OracleMerge { left: a, right: b, merged });
    }
    (vocab, merges)
}

/// A toy word-count table over at most `alphabet` letters, words of 1..=6 chars.
pub fn random_word_counts(rng: &mut TestRng, alphabet: usize) -> BTreeMap<String, u64> {
    let letters: Vec<char> = "abcde".chars().take(alphabet).collect();
    let mut counts = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=12) {
        let len = rng.gen_range(1..=6);
        let w: String = (0..len).map(|_| *letters.choose(rng).unwrap()).collect();
        *counts.entry(w).or_insert(0) += rng.gen_range(1..=9);
    }
    counts
}

// ---------------------------------------------------------- corpus generators

const ENGLISH: &[&str] = &[
    "the",
    "a",
    "of",
    "and",
    "to",
    "in",
    "is",
    "running",
    "runs",
    "runner",
    "cat",
    "cats",
    "dog",
    "dogs",
    "house",
    "housing",
    "connect",
    "connected",
    "connection",
    "river",
    "rivers",
    "city",
    "cities",
    "capital",
    "university",
    "studies",
    "studying",
    "generalization",
    "relational",
    "happy",
    "happiness",
    "national",
    "quickly",
    "jumped",
    "jumping",
    "sky",
    "ray",
    "bank",
    "banking",
    "market",
    "marketing",
    "Wikipedia",
    "language",
    "languages",
];

const SYLLABLES: &[&str] = &[
    "ka", "mi", "to", "ra", "ne", "su", "lo", "ba", "zi", "wa", "ki", "ni", "ja", "mu", "é", "ü", "ø", "ж", "ко", "ни",
    "語", "ท", "한",
];

pub fn random_english_word(rng: &mut TestRng) -> String {
    let w = ENGLISH.choose(rng).unwrap().to_string();
    match rng.gen_range(0..10) {
        0 => w.to_uppercase(),
        1 => {
            let mut c = w.chars();
            c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
        }
        2 => format!("{w},"),
        3 => format!("{w}."),
        _ => w,
    }
}

pub fn random_synthetic_word(rng: &mut TestRng) -> String {
    (0..rng.gen_range(1..=4)).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

pub fn random_text(rng: &mut TestRng, max_words: usize, english: bool) -> String {
    let n = rng.gen_range(0..=max_words);
    let words: Vec<String> = (0..n)
        .map(|_| if english && rng.gen_bool(0.7) { random_english_word(rng) } else { random_synthetic_word(rng) })
        .collect();
    words.join(if rng.gen_bool(0.9) { " " } else { "  " })
}

pub fn random_corpus(rng: &mut TestRng, n_docs: usize, english: bool) -> Vec<Document> {
    (0..n_docs)
        .map(|i| {
            let title = if rng.gen_bool(0.5) { random_text(rng, 4, english) } else { String::new() };
            Document::new(format!("doc{:05}", i * 7 % 100_003), title, random_text(rng, 30, english))
        })
        .collect()
}

pub fn random_queries(rng: &mut TestRng, n: usize, english: bool) -> Vec<Query> {
    (0..n).map(|i| Query::new(format!("q{i}"), random_text(rng, 6, english))).collect()
}

// ------------------------------------------------------------ run generators

pub fn run_from_scores(tag: &str, queries: Vec<(String, Vec<(String, f64)>)>) -> RunFile {
    RunFile { tag: tag.into(), queries: queries.into_iter().map(|(q, s)| (q, top_k(s, usize::MAX))).collect() }
}

/// A random run over a shared document pool, with some exact score ties.
pub fn random_run(rng: &mut TestRng, tag: &str, queries: usize, pool: usize) -> RunFile {
    let qs = (0..queries)
        .map(|q| {
            let mut docs: Vec<usize> = (0..pool).collect();
            docs.shuffle(rng);
            docs.truncate(rng.gen_range(0..=pool.min(30)));
            let scored = docs
                .into_iter()
                .map(|d| {
                    let s = if rng.gen_bool(0.2) { f64::from(rng.gen_range(0..4)) } else { rng.gen_range(0.0..50.0) };
                    (format!("d{d:03}"), s)
                })
                .collect();
            (format!("q{q}"), scored)
        })
        .collect();
    run_from_scores(tag, qs)
}

pub fn doc_ids(list: &[ScoredDoc]) -> Vec<&str> {
    list.iter().map(|d| d.doc_id.as_str()).collect()
}
