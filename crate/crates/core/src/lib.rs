//! Lexical retrieval with interchangeable tokenizers.
//!
//! Index a corpus under whitespace splitting, an English analyzer, or
//! WordPiece subwords, score it with BM25, fuse runs, and evaluate them.
//! Each capability has a runnable program under `examples/`.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod fusion;
pub mod index;
mod parallel;
pub mod retrieval;
pub mod tokenize;

pub use corpus::{Document, Qrels, Query};
pub use error::{Error, Result};
pub use index::{build_index, load_index, save_index, IndexOptions, InvertedIndex};
pub use retrieval::{run_queries, search, Bm25Params, RunFile, ScoredDoc};
pub use tokenize::{tokenize, Mechanism, TokenizerConfig, WordPieceVocab};
