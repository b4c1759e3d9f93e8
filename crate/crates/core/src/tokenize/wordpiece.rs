//! WordPiece vocabularies and greedy longest-match-first segmentation.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_UNK_TOKEN: &str = "[UNK]";
pub const DEFAULT_CONTINUATION_PREFIX: &str = "##";
pub const DEFAULT_MAX_WORD_CHARS: usize = 100;

/// An ordered subword vocabulary; an entry's position is its id.
#[derive(Debug, Clone)]
pub struct WordPieceVocab {
    entries: Vec<String>,
    /// Every entry, for matches at word start.
    initial: HashMap<Box<str>, u32>,
    /// Continuation entries keyed without their prefix.
    continuation: HashMap<Box<str>, u32>,
    unk_token: String,
    continuation_prefix: String,
    max_word_chars: usize,
}

impl PartialEq for WordPieceVocab {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
            && self.unk_token == other.unk_token
            && self.continuation_prefix == other.continuation_prefix
            && self.max_word_chars == other.max_word_chars
    }
}

impl WordPieceVocab {
    /// Builds a vocabulary with the default `[UNK]` / `##` conventions.
    pub fn new(entries: Vec<String>) -> Result<Self> {
        Self::with_conventions(entries, DEFAULT_UNK_TOKEN, DEFAULT_CONTINUATION_PREFIX, DEFAULT_MAX_WORD_CHARS)
    }

    pub fn with_conventions(
        entries: Vec<String>,
        unk_token: &str,
        continuation_prefix: &str,
        max_word_chars: usize,
    ) -> Result<Self> {
        if continuation_prefix.is_empty() {
            return Err(Error::InvalidVocab("continuation prefix must not be empty".into()));
        }
        let mut initial: HashMap<Box<str>, u32> = HashMap::with_capacity(entries.len());
        let mut continuation = HashMap::new();
        for (id, entry) in entries.iter().enumerate() {
            if entry.is_empty() {
                return Err(Error::InvalidVocab(format!("empty entry at line {}", id + 1)));
            }
            if entry == continuation_prefix {
                return Err(Error::InvalidVocab(format!(
                    "entry at line {} equals the bare continuation prefix {continuation_prefix:?}",
                    id + 1
                )));
            }
            if let Some(&first) = initial.get(entry.as_str()) {
                return Err(Error::DuplicateVocabEntry {
                    token: entry.clone(),
                    first: first as usize + 1,
                    second: id + 1,
                });
            }
            let id = u32::try_from(id).map_err(|_| Error::InvalidVocab("more than u32::MAX entries".into()))?;
            initial.insert(entry.as_str().into(), id);
            if let Some(rest) = entry.strip_prefix(continuation_prefix) {
                continuation.insert(rest.into(), id);
            }
        }
        if !initial.contains_key(unk_token) {
            return Err(Error::InvalidVocab(format!("unknown token {unk_token:?} is not in the vocabulary")));
        }
        Ok(Self {
            entries,
            initial,
            continuation,
            unk_token: unk_token.to_string(),
            continuation_prefix: continuation_prefix.to_string(),
            max_word_chars,
        })
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn unk_token(&self) -> &str {
        &self.unk_token
    }

    pub fn continuation_prefix(&self) -> &str {
        &self.continuation_prefix
    }

    pub fn max_word_chars(&self) -> usize {
        self.max_word_chars
    }

    pub fn set_max_word_chars(&mut self, max_word_chars: usize) {
        self.max_word_chars = max_word_chars;
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.initial.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.initial.contains_key(token)
    }

    /// Whether `piece` is in the vocabulary in the position given: as a
    /// plain entry at offset 0, as a prefixed continuation entry otherwise.
    pub fn matches_at(&self, piece: &str, word_start: bool) -> bool {
        if word_start {
            self.initial.contains_key(piece)
        } else {
            self.continuation.contains_key(piece)
        }
    }

    /// SHA-256 over the canonical file serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for e in &self.entries {
            hasher.update(e.as_bytes());
            hasher.update(b"\n");
        }
        hex(&hasher.finalize())
    }

    /// Segments one normalized word.
    pub fn segment(&self, word: &str) -> Vec<String> {
        self.segment_pieces(word)
            .map(|pieces| {
                pieces
                    .into_iter()
                    .map(|(start, end)| {
                        if start == 0 {
                            word[..end].to_string()
                        } else {
                            format!("{}{}", self.continuation_prefix, &word[start..end])
                        }
                    })
                    .collect()
            })
            .unwrap_or_else(|| vec![self.unk_token.clone()])
    }

    /// Byte spans of the greedy segmentation, or `None` when the word maps
    /// to the unknown token.
    pub fn segment_pieces(&self, word: &str) -> Option<Vec<(usize, usize)>> {
        if word.is_empty() {
            return Some(Vec::new());
        }
        if word.chars().count() > self.max_word_chars {
            return None;
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < word.len() {
            let mut end = word.len();
            loop {
                if self.matches_at(&word[start..end], start == 0) {
                    break;
                }
                end = prev_boundary(word, end);
                if end <= start {
                    return None;
                }
            }
            pieces.push((start, end));
            start = end;
        }
        Some(pieces)
    }
}

fn prev_boundary(s: &str, mut i: usize) -> usize {
    i -= 1;
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write as _;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Reads a one-token-per-line vocabulary file (line index = id).
pub fn load_vocab(path: impl AsRef<Path>) -> Result<WordPieceVocab> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    let text =
        String::from_utf8(bytes).map_err(|e| Error::InvalidVocab(format!("{}: invalid UTF-8: {e}", path.display())))?;
    parse_vocab(&text)
}

pub fn parse_vocab(text: &str) -> Result<WordPieceVocab> {
    let entries = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l).to_string()).collect();
    WordPieceVocab::new(entries)
}

pub fn save_vocab(vocab: &WordPieceVocab, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(|e| Error::io(path, e))?);
    for e in vocab.entries() {
        writeln!(out, "{e}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
