//! Tokenizes one sentence with each mechanism.
//!
//! `cargo run --example tokenize_three_ways -- "Some text"`

use std::path::Path;

use lexmatch::corpus::load_corpus;
use lexmatch::tokenize::{tokenize, train_wordpiece, TokenizerConfig, TrainerParams};
use lexmatch::Document;

fn main() -> lexmatch::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "The runners were running to Dar es Salaam's harbour.".into());

    // A small vocabulary trained on the bundled corpus plus the sentence itself.
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment/corpus.jsonl");
    let mut docs: Vec<Document> = load_corpus(corpus)?.collect::<lexmatch::Result<_>>()?;
    docs.push(Document::new("input", "", text.as_str()));
    let vocab = train_wordpiece(docs, &TrainerParams::new(500))?;

    for config in
        [TokenizerConfig::whitespace(), TokenizerConfig::english_analyzer(), TokenizerConfig::wordpiece(vocab)]
    {
        println!("{:<10} {:?}", config.mechanism.to_string(), tokenize(&text, &config)?);
    }
    Ok(())
}
