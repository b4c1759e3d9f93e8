//! Scores a run with MRR@k and Recall@k and prints per-query TSV.
//!
//! `cargo run --example evaluate_run -- [run.trec qrels.txt]`

use std::path::Path;

use lexmatch::corpus::{load_corpus, load_qrels, load_queries};
use lexmatch::eval::{evaluate, Metric};
use lexmatch::{build_index, run_queries, Bm25Params, IndexOptions, RunFile, TokenizerConfig};

fn main() -> lexmatch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment");
    let (run, qrels) = if let [run, qrels] = args.as_slice() {
        (RunFile::load(run)?, load_qrels(qrels)?)
    } else {
        let config = TokenizerConfig::whitespace();
        let index = build_index(load_corpus(fixtures.join("corpus.jsonl"))?, &config, IndexOptions::default())?;
        let queries = load_queries(fixtures.join("queries.tsv"))?;
        let run = run_queries(&index, &queries, &config, &Bm25Params::default(), 100, "whitespace", None)?;
        (run, load_qrels(fixtures.join("qrels.txt"))?)
    };

    let report = evaluate(&run, &qrels, 10, 1);
    report.write_tsv(Metric::Mrr, std::io::stdout()).expect("stdout");
    println!("Recall@10 = {:.4} over {} queries", report.recall_at_k, report.num_evaluated());
    Ok(())
}
