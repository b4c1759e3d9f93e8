//! English analyzer: word-boundary segmentation, lowercasing, stopword
//! removal and Porter stemming.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};
use unicode_segmentation::UnicodeSegmentation;

use super::porter::porter_stem;
use super::wordpiece::hex;

const ENGLISH_STOPWORDS: &str = include_str!("../../data/english_stopwords.txt");

/// A set of lowercase words removed before stemming.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl StopwordList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { words: words.into_iter().map(Into::into).collect() }
    }

    /// The classic 33-word English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for w in &self.words {
            hasher.update(w.as_bytes());
            hasher.update(b"\n");
        }
        hex(&hasher.finalize())
    }
}

pub fn analyze(text: &str, stopwords: &StopwordList) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).filter(|w| !stopwords.contains(w)).map(|w| porter_stem(&w)).collect()
}
