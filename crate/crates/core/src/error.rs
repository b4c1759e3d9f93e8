use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{source_name}:{line}: {message}")]
    Format { source_name: String, line: usize, message: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("duplicate vocabulary entry {token:?} on lines {first} and {second}")]
    DuplicateVocabEntry { token: String, first: usize, second: usize },

    #[error("invalid vocabulary: {0}")]
    InvalidVocab(String),

    #[error("vocabulary size {requested} is below the minimum of {minimum} (alphabet plus special tokens)")]
    VocabTooSmall { requested: usize, minimum: usize },

    #[error("cannot train on an empty corpus")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("tokenizer mismatch: index was built with `{index}` but the query tokenizer is `{query}`")]
    TokenizerMismatch { index: String, query: String },

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("unsupported format version {found} in {file} (expected {expected})")]
    Version { file: String, found: u32, expected: u32 },

    #[error("checksum mismatch in {0}")]
    Checksum(String),

    #[error("corrupt index file {file}: {message}")]
    Corrupt { file: String, message: String },

    #[error("input error: {0}")]
    Input(String),

    #[error("reference score for language {0:?} is missing or zero")]
    MissingReference(String),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format { source_name: source_name.into(), line, message: message.into() }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
