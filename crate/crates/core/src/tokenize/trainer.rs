//! Unsupervised WordPiece vocabulary training.
//!
//! Starting from single characters, the trainer repeatedly merges the
//! adjacent symbol pair with the highest likelihood score
//! `freq(ab) / (freq(a) * freq(b))`. Ties go to the more frequent pair, then
//! to the lexicographically smaller merged string, then to the smaller
//! `(left, right)` pair of symbol strings.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::normalize::basic_normalize;
use super::wordpiece::{WordPieceVocab, DEFAULT_CONTINUATION_PREFIX, DEFAULT_UNK_TOKEN};
use crate::corpus::Document;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainerParams {
    pub vocab_size: usize,
    pub min_pair_freq: u64,
    pub lowercase: bool,
}

impl TrainerParams {
    pub fn new(vocab_size: usize) -> Self {
        Self { vocab_size, min_pair_freq: 2, lowercase: true }
    }
}

/// One merge performed by the trainer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeStep {
    pub left: String,
    pub right: String,
    pub merged: String,
    pub pair_freq: u64,
    pub left_freq: u64,
    pub right_freq: u64,
    /// Whether the merged symbol was new (and therefore added to the vocabulary).
    pub added: bool,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub vocab: WordPieceVocab,
    pub merges: Vec<MergeStep>,
}

pub fn train_wordpiece<I>(docs: I, params: &TrainerParams) -> Result<WordPieceVocab>
where
    I: IntoIterator<Item = Document>,
{
    train_wordpiece_traced(docs, params).map(|t| t.vocab)
}

/// Counts normalized word frequencies over title and body of each document.
pub fn count_words<I>(docs: I, lowercase: bool) -> BTreeMap<String, u64>
where
    I: IntoIterator<Item = Document>,
{
    let mut counts = BTreeMap::new();
    for doc in docs {
        for text in [&doc.title, &doc.body] {
            for w in basic_normalize(text, lowercase) {
                *counts.entry(w).or_insert(0) += 1;
            }
        }
    }
    counts
}

pub fn train_wordpiece_traced<I>(docs: I, params: &TrainerParams) -> Result<TrainingOutcome>
where
    I: IntoIterator<Item = Document>,
{
    train_from_word_counts(&count_words(docs, params.lowercase), params)
}

pub fn train_from_word_counts(word_counts: &BTreeMap<String, u64>, params: &TrainerParams) -> Result<TrainingOutcome> {
    if params.min_pair_freq < 1 {
        return Err(Error::Config("min_pair_freq must be at least 1".into()));
    }
    if word_counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let prefix = DEFAULT_CONTINUATION_PREFIX;

    let mut initial_chars = BTreeSet::new();
    let mut continuation_chars = BTreeSet::new();
    for word in word_counts.keys() {
        for (i, c) in word.chars().enumerate() {
            initial_chars.insert(c.to_string());
            if i > 0 {
                continuation_chars.insert(format!("{prefix}{c}"));
            }
        }
    }

    let mut entries = vec![DEFAULT_UNK_TOKEN.to_string()];
    entries.extend(initial_chars);
    entries.extend(continuation_chars);
    let minimum = entries.len();
    if params.vocab_size < minimum {
        return Err(Error::VocabTooSmall { requested: params.vocab_size, minimum });
    }

    let mut state = MergeState::new(word_counts, prefix);
    let mut in_vocab: HashSet<String> = entries.iter().cloned().collect();
    let mut merges = Vec::new();

    while entries.len() < params.vocab_size {
        let Some(best) = state.best_pair(params.min_pair_freq) else {
            break;
        };
        let (a, b) = best.pair;
        let merged = state.merged_string(a, b);
        let step = MergeStep {
            left: state.symbols[a as usize].clone(),
            right: state.symbols[b as usize].clone(),
            merged: merged.clone(),
            pair_freq: best.pair_freq,
            left_freq: best.left_freq,
            right_freq: best.right_freq,
            added: !in_vocab.contains(&merged),
        };
        if step.added {
            in_vocab.insert(merged.clone());
            entries.push(merged.clone());
        }
        state.apply_merge(a, b, merged);
        merges.push(step);
    }

    Ok(TrainingOutcome { vocab: WordPieceVocab::new(entries)?, merges })
}

struct Candidate {
    pair: (u32, u32),
    pair_freq: u64,
    left_freq: u64,
    right_freq: u64,
}

struct MergeState<'p> {
    prefix: &'p str,
    symbols: Vec<String>,
    symbol_ids: HashMap<String, u32>,
    words: Vec<(Vec<u32>, u64)>,
    symbol_freq: Vec<u64>,
    pair_freq: HashMap<(u32, u32), u64>,
    pair_words: HashMap<(u32, u32), BTreeSet<usize>>,
}

impl<'p> MergeState<'p> {
    fn new(word_counts: &BTreeMap<String, u64>, prefix: &'p str) -> Self {
        let mut state = Self {
            prefix,
            symbols: Vec::new(),
            symbol_ids: HashMap::new(),
            words: Vec::with_capacity(word_counts.len()),
            symbol_freq: Vec::new(),
            pair_freq: HashMap::new(),
            pair_words: HashMap::new(),
        };
        for (word, &count) in word_counts {
            let syms: Vec<u32> = word
                .chars()
                .enumerate()
                .map(|(i, c)| {
                    let s = if i == 0 { c.to_string() } else { format!("{prefix}{c}") };
                    state.intern(s)
                })
                .collect();
            state.words.push((syms, count));
        }
        for w in 0..state.words.len() {
            state.add_word(w);
        }
        state
    }

    fn intern(&mut self, s: String) -> u32 {
        if let Some(&id) = self.symbol_ids.get(&s) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbol_ids.insert(s.clone(), id);
        self.symbols.push(s);
        self.symbol_freq.push(0);
        id
    }

    fn add_word(&mut self, w: usize) {
        let (syms, count) = &self.words[w];
        for &s in syms {
            self.symbol_freq[s as usize] += count;
        }
        for pair in syms.windows(2) {
            let key = (pair[0], pair[1]);
            *self.pair_freq.entry(key).or_insert(0) += count;
            self.pair_words.entry(key).or_default().insert(w);
        }
    }

    fn remove_word(&mut self, w: usize) {
        let (syms, count) = &self.words[w];
        for &s in syms {
            self.symbol_freq[s as usize] -= count;
        }
        for pair in syms.windows(2) {
            let key = (pair[0], pair[1]);
            if let Some(f) = self.pair_freq.get_mut(&key) {
                *f -= count;
                if *f == 0 {
                    self.pair_freq.remove(&key);
                    self.pair_words.remove(&key);
                }
            }
            if let Some(ws) = self.pair_words.get_mut(&key) {
                ws.remove(&w);
            }
        }
    }

    fn merged_string(&self, a: u32, b: u32) -> String {
        let right = &self.symbols[b as usize];
        let right = right.strip_prefix(self.prefix).unwrap_or(right);
        format!("{}{}", self.symbols[a as usize], right)
    }

    fn best_pair(&self, min_pair_freq: u64) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for (&pair, &pair_freq) in &self.pair_freq {
            if pair_freq < min_pair_freq {
                continue;
            }
            let cand = Candidate {
                pair,
                pair_freq,
                left_freq: self.symbol_freq[pair.0 as usize],
                right_freq: self.symbol_freq[pair.1 as usize],
            };
            best = match best {
                Some(cur) if self.compare(&cur, &cand) != Ordering::Less => Some(cur),
                _ => Some(cand),
            };
        }
        best
    }

    /// `Greater` means `x` wins over `y`.
    fn compare(&self, x: &Candidate, y: &Candidate) -> Ordering {
        // x.f / (x.l * x.r)  vs  y.f / (y.l * y.r), compared exactly.
        let lhs = x.pair_freq as u128 * (y.left_freq as u128 * y.right_freq as u128);
        let rhs = y.pair_freq as u128 * (x.left_freq as u128 * x.right_freq as u128);
        lhs.cmp(&rhs)
            .then(x.pair_freq.cmp(&y.pair_freq))
            .then_with(|| self.merged_string(y.pair.0, y.pair.1).cmp(&self.merged_string(x.pair.0, x.pair.1)))
            .then_with(|| {
                let xs = (&self.symbols[x.pair.0 as usize], &self.symbols[x.pair.1 as usize]);
                let ys = (&self.symbols[y.pair.0 as usize], &self.symbols[y.pair.1 as usize]);
                ys.cmp(&xs)
            })
    }

    fn apply_merge(&mut self, a: u32, b: u32, merged: String) {
        let m = self.intern(merged);
        let affected: Vec<usize> =
            self.pair_words.get(&(a, b)).map(|ws| ws.iter().copied().collect()).unwrap_or_default();
        for w in affected {
            self.remove_word(w);
            let syms = &self.words[w].0;
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == a && syms[i + 1] == b {
                    out.push(m);
                    i += 2;
                } else {
                    out.push(syms[i]);
                    i += 1;
                }
            }
            self.words[w].0 = out;
            self.add_word(w);
        }
    }
}
