//! The three tokenization mechanisms: whitespace, an English analyzer, and
//! WordPiece, plus WordPiece vocabulary training.

mod analyzer;
mod normalize;
mod porter;
mod trainer;
mod wordpiece;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use analyzer::{analyze, StopwordList};
pub use normalize::basic_normalize;
pub use porter::porter_stem;
pub use trainer::{
    count_words, train_from_word_counts, train_wordpiece, train_wordpiece_traced, MergeStep, TrainerParams,
    TrainingOutcome,
};
pub use wordpiece::{
    load_vocab, parse_vocab, save_vocab, WordPieceVocab, DEFAULT_CONTINUATION_PREFIX, DEFAULT_MAX_WORD_CHARS,
    DEFAULT_UNK_TOKEN,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Whitespace,
    Analyzer,
    WordPiece,
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Whitespace => "whitespace",
            Mechanism::Analyzer => "analyzer",
            Mechanism::WordPiece => "wordpiece",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whitespace" => Ok(Mechanism::Whitespace),
            "analyzer" => Ok(Mechanism::Analyzer),
            "wordpiece" => Ok(Mechanism::WordPiece),
            other => Err(Error::Config(format!("unknown tokenizer {other:?}"))),
        }
    }
}

/// Which tokenizer to run and with what resources.
///
/// `lowercase` means different things per mechanism: for WordPiece it selects
/// the uncased normalization (on by default); for whitespace it enables case
/// folding, which is off by default. The analyzer always lowercases.
#[derive(Debug, Clone)]
pub struct TokenizerConfig {
    pub mechanism: Mechanism,
    pub vocab: Option<Arc<WordPieceVocab>>,
    pub lowercase: bool,
    pub drop_unknown: bool,
    pub stopwords: Option<Arc<StopwordList>>,
}

impl TokenizerConfig {
    pub fn whitespace() -> Self {
        Self { mechanism: Mechanism::Whitespace, vocab: None, lowercase: false, drop_unknown: true, stopwords: None }
    }

    pub fn analyzer(stopwords: StopwordList) -> Self {
        Self {
            mechanism: Mechanism::Analyzer,
            vocab: None,
            lowercase: true,
            drop_unknown: true,
            stopwords: Some(Arc::new(stopwords)),
        }
    }

    /// Analyzer with the bundled English stopword list.
    pub fn english_analyzer() -> Self {
        Self::analyzer(StopwordList::english())
    }

    pub fn wordpiece(vocab: impl Into<Arc<WordPieceVocab>>) -> Self {
        Self {
            mechanism: Mechanism::WordPiece,
            vocab: Some(vocab.into()),
            lowercase: true,
            drop_unknown: true,
            stopwords: None,
        }
    }

    pub fn with_lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }

    pub fn with_drop_unknown(mut self, drop_unknown: bool) -> Self {
        self.drop_unknown = drop_unknown;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.mechanism {
            Mechanism::WordPiece if self.vocab.is_none() => {
                Err(Error::Config("the wordpiece tokenizer requires a vocabulary".into()))
            }
            Mechanism::Analyzer if self.stopwords.is_none() => {
                Err(Error::Config("the analyzer requires a stopword list (it may be empty)".into()))
            }
            _ => Ok(()),
        }
    }

    /// Identifies everything that affects the produced terms.
    pub fn fingerprint(&self) -> String {
        match self.mechanism {
            Mechanism::Whitespace => format!("whitespace;lowercase={}", self.lowercase as u8),
            Mechanism::Analyzer => format!(
                "analyzer;porter;stopwords={}",
                self.stopwords.as_ref().map_or_else(|| "none".to_string(), |s| short(&s.content_hash()))
            ),
            Mechanism::WordPiece => match &self.vocab {
                Some(v) => format!(
                    "wordpiece;lowercase={};drop_unk={};unk={};prefix={};max_chars={};vocab={}",
                    self.lowercase as u8,
                    self.drop_unknown as u8,
                    v.unk_token(),
                    v.continuation_prefix(),
                    v.max_word_chars(),
                    short(&v.content_hash())
                ),
                None => "wordpiece;vocab=none".to_string(),
            },
        }
    }
}

fn short(hash: &str) -> String {
    hash[..16.min(hash.len())].to_string()
}

/// Splits on Unicode whitespace, leaving tokens untouched.
pub fn whitespace_tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// Normalizes `text` and segments every word against the vocabulary.
pub fn wordpiece_tokenize(text: &str, vocab: &WordPieceVocab, lowercase: bool, drop_unknown: bool) -> Vec<String> {
    let mut out = Vec::new();
    for word in basic_normalize(text, lowercase) {
        for piece in vocab.segment(&word) {
            if drop_unknown && piece == vocab.unk_token() {
                continue;
            }
            out.push(piece);
        }
    }
    out
}

pub fn analyzer_tokenize(text: &str, stopwords: &StopwordList) -> Vec<String> {
    analyze(text, stopwords)
}

/// Dispatches to the configured mechanism.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Result<Vec<String>> {
    match config.mechanism {
        Mechanism::Whitespace => {
            let mut tokens = whitespace_tokenize(text);
            if config.lowercase {
                tokens.iter_mut().for_each(|t| *t = t.to_lowercase());
            }
            Ok(tokens)
        }
        Mechanism::Analyzer => {
            let stopwords = config
                .stopwords
                .as_deref()
                .ok_or_else(|| Error::Config("the analyzer requires a stopword list (it may be empty)".into()))?;
            Ok(analyze(text, stopwords))
        }
        Mechanism::WordPiece => {
            let vocab = config
                .vocab
                .as_deref()
                .ok_or_else(|| Error::Config("the wordpiece tokenizer requires a vocabulary".into()))?;
            Ok(wordpiece_tokenize(text, vocab, config.lowercase, config.drop_unknown))
        }
    }
}

/// A serializable description of a [`TokenizerConfig`], as recorded next to
/// persisted indexes so that queries can be tokenized the same way later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerSpec {
    pub mechanism: Mechanism,
    pub lowercase: bool,
    pub drop_unknown: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocab_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_word_chars: Option<usize>,
}

impl TokenizerSpec {
    /// Flag-style construction: `lowercase` is the WordPiece/whitespace flag
    /// (ignored for the analyzer), `vocab_path` is required for WordPiece.
    pub fn new(mechanism: Mechanism, vocab_path: Option<PathBuf>, lowercase: Option<bool>, drop_unknown: bool) -> Self {
        let lowercase = match mechanism {
            Mechanism::Whitespace => lowercase.unwrap_or(false),
            Mechanism::Analyzer => true,
            Mechanism::WordPiece => lowercase.unwrap_or(true),
        };
        Self { mechanism, lowercase, drop_unknown, vocab_path, max_word_chars: None }
    }

    pub fn build(&self) -> Result<TokenizerConfig> {
        self.build_relative_to(None)
    }

    /// Builds the config, resolving a relative vocabulary path against `base`.
    pub fn build_relative_to(&self, base: Option<&Path>) -> Result<TokenizerConfig> {
        let config = match self.mechanism {
            Mechanism::Whitespace => TokenizerConfig::whitespace().with_lowercase(self.lowercase),
            Mechanism::Analyzer => TokenizerConfig::english_analyzer(),
            Mechanism::WordPiece => {
                let path = self
                    .vocab_path
                    .as_ref()
                    .ok_or_else(|| Error::Config("the wordpiece tokenizer requires a vocabulary file".into()))?;
                let path = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                let mut vocab = load_vocab(path)?;
                if let Some(m) = self.max_word_chars {
                    vocab.set_max_word_chars(m);
                }
                TokenizerConfig::wordpiece(vocab).with_lowercase(self.lowercase)
            }
        };
        Ok(config.with_drop_unknown(self.drop_unknown))
    }
}
