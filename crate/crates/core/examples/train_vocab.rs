//! Trains a WordPiece vocabulary and prints the first merges.
//!
//! `cargo run --example train_vocab -- [corpus.jsonl] [size]`

use std::path::PathBuf;

use lexmatch::corpus::load_corpus;
use lexmatch::tokenize::{count_words, train_from_word_counts, TrainerParams};

fn main() -> lexmatch::Result<()> {
    let mut args = std::env::args().skip(1);
    let corpus = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment/corpus.jsonl"));
    let size = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);

    let docs: Vec<_> = load_corpus(&corpus)?.collect::<lexmatch::Result<_>>()?;
    let counts = count_words(docs, true);
    let outcome = train_from_word_counts(&counts, &TrainerParams::new(size))?;

    println!("{} word types, {} vocabulary entries", counts.len(), outcome.vocab.len());
    for m in outcome.merges.iter().take(15) {
        println!(
            "{:>8} + {:<8} -> {:<10} freq {} / ({} x {})",
            m.left, m.right, m.merged, m.pair_freq, m.left_freq, m.right_freq
        );
    }
    Ok(())
}
