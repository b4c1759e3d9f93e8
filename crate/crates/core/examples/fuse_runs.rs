//! Fuses an analyzer run with a whitespace run at several weights.

use std::path::Path;

use lexmatch::corpus::{load_corpus, load_queries};
use lexmatch::fusion::{fuse, FusionParams};
use lexmatch::{build_index, run_queries, Bm25Params, Document, IndexOptions, TokenizerConfig};

fn main() -> lexmatch::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment");
    let docs: Vec<Document> = load_corpus(fixtures.join("corpus.jsonl"))?.collect::<lexmatch::Result<_>>()?;
    let queries = load_queries(fixtures.join("queries.tsv"))?;

    let mut runs = Vec::new();
    for (tag, config) in
        [("analyzer", TokenizerConfig::english_analyzer()), ("whitespace", TokenizerConfig::whitespace())]
    {
        let index = build_index(docs.iter().cloned().map(Ok), &config, IndexOptions::default())?;
        runs.push(run_queries(&index, &queries, &config, &Bm25Params::default(), 10, tag, None)?);
    }

    let qid = &queries[0].query_id;
    println!("query {qid}: {}", queries[0].text);
    for alpha in [1.0, 0.5, 0.0] {
        let fused = fuse(&runs[0], &runs[1], &FusionParams { alpha, k: 3, ..Default::default() })?;
        let top: Vec<String> =
            fused.get(qid).unwrap_or(&[]).iter().map(|d| format!("{}={:.3}", d.doc_id, d.score)).collect();
        println!("{:<28} {}", fused.tag, top.join("  "));
    }
    Ok(())
}
