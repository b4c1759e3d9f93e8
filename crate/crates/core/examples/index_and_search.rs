//! Builds an analyzer index over the bundled corpus, saves it, reloads it and
//! runs a query.
//!
//! `cargo run --example index_and_search -- "capital of Tanzania"`

use std::path::Path;

use lexmatch::corpus::load_corpus;
use lexmatch::{build_index, load_index, save_index, search, Bm25Params, IndexOptions, TokenizerConfig};

fn main() -> lexmatch::Result<()> {
    let query = std::env::args().nth(1).unwrap_or_else(|| "capital of Tanzania".into());
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment/corpus.jsonl");

    let config = TokenizerConfig::english_analyzer();
    let index = build_index(load_corpus(&corpus)?, &config, IndexOptions::default())?;
    let dir = std::env::temp_dir().join("lexmatch-example-index");
    save_index(&index, &dir)?;
    let index = load_index(&dir)?;
    println!("{} docs, {} terms, avgdl {:.2}", index.num_docs(), index.num_terms(), index.stats().avg_doc_len);

    for hit in search(&index, &query, &config, &Bm25Params::default(), 5)? {
        println!("{:>2}  {:<5} {:.4}", hit.rank, hit.doc_id, hit.score);
    }
    Ok(())
}
