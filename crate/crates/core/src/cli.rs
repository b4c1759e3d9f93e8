//! The `lexmatch` command line.
//!
//! Exit status: 0 success, 1 usage error, 2 data or format error, 3 internal
//! invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::corpus::{load_corpus, load_qrels, load_queries};
use crate::error::{Error, Result};
use crate::eval::{evaluate, Metric};
use crate::experiment::{run_experiment, ExperimentConfig};
use crate::fusion::{fuse, FusionMode, FusionParams};
use crate::index::{build_index, load_index, save_index, IndexOptions};
use crate::retrieval::{run_queries, Bm25Params, RunFile};
use crate::tokenize::{count_words, save_vocab, train_from_word_counts, Mechanism, TokenizerSpec, TrainerParams};

pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "lexmatch", version, about = "BM25 retrieval under whitespace, analyzer and WordPiece tokenization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and persist an inverted index.
    Index(IndexArgs),
    /// Run queries against an index and write a TREC run.
    Search(SearchArgs),
    /// Learn a WordPiece vocabulary from a corpus.
    TrainVocab(TrainArgs),
    /// Combine two runs.
    Fuse(FuseArgs),
    /// Score a run against relevance judgments.
    Eval(EvalArgs),
    /// Run a full comparison described by a TOML file.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TokenizerArg {
    Whitespace,
    Analyzer,
    Wordpiece,
}

impl From<TokenizerArg> for Mechanism {
    fn from(t: TokenizerArg) -> Self {
        match t {
            TokenizerArg::Whitespace => Mechanism::Whitespace,
            TokenizerArg::Analyzer => Mechanism::Analyzer,
            TokenizerArg::Wordpiece => Mechanism::WordPiece,
        }
    }
}

#[derive(Debug, Args)]
struct TokenizerFlags {
    /// Vocabulary file (wordpiece only).
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Keep case (wordpiece cased mode); whitespace never folds case unless --lowercase.
    #[arg(long, conflicts_with = "lowercase")]
    no_lowercase: bool,
    /// Fold case for the whitespace tokenizer.
    #[arg(long)]
    lowercase: bool,
    /// Emit the unknown token instead of dropping it.
    #[arg(long)]
    keep_unk: bool,
}

impl TokenizerFlags {
    fn spec(&self, mechanism: Mechanism) -> Result<TokenizerSpec> {
        if mechanism != Mechanism::WordPiece && self.vocab.is_some() {
            return Err(Error::Config("--vocab only applies to the wordpiece tokenizer".into()));
        }
        let lowercase = match (self.lowercase, self.no_lowercase) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        let vocab = self.vocab.as_ref().map(|p| absolute(p)).transpose()?;
        Ok(TokenizerSpec::new(mechanism, vocab, lowercase, !self.keep_unk))
    }
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    tokenizer: TokenizerArg,
    #[command(flatten)]
    flags: TokenizerFlags,
    /// Index the body only.
    #[arg(long)]
    no_title: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 0.9)]
    k1: f64,
    #[arg(long, default_value_t = 0.4)]
    b: f64,
    #[arg(long)]
    tag: Option<String>,
    /// Query tokenizer; defaults to the one recorded in the index.
    #[arg(long, value_enum)]
    tokenizer: Option<TokenizerArg>,
    #[command(flatten)]
    flags: TokenizerFlags,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    size: usize,
    /// Minimum pair frequency for a merge.
    #[arg(long, default_value_t = 2)]
    min_freq: u64,
    #[arg(long)]
    out: PathBuf,
    /// Train on cased text.
    #[arg(long)]
    no_lowercase: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Minmax,
    Raw,
}

#[derive(Debug, Args)]
struct FuseArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, value_enum, default_value = "minmax")]
    mode: ModeArg,
    #[arg(long)]
    tag: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Mrr,
    Recall,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
    #[arg(long, value_enum, default_value = "mrr")]
    metric: MetricArg,
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Minimum grade counted as relevant.
    #[arg(long, default_value_t = 1)]
    rel_threshold: u32,
    /// Write the TSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Index(a) => cmd_index(a),
        Command::Search(a) => cmd_search(a),
        Command::TrainVocab(a) => cmd_train_vocab(a),
        Command::Fuse(a) => cmd_fuse(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn cmd_index(a: IndexArgs) -> Result<()> {
    let spec = a.flags.spec(a.tokenizer.into())?;
    let config = spec.build()?;
    let options = IndexOptions { include_title: !a.no_title, threads: a.threads };
    let mut index = build_index(load_corpus(&a.corpus)?, &config, options)?;
    index.set_tokenizer_spec(Some(spec));
    save_index(&index, &a.out)?;
    log::info!("indexed {} documents, {} terms into {}", index.num_docs(), index.num_terms(), a.out.display());
    Ok(())
}

#[derive(Serialize)]
struct RunMeta<'a> {
    tag: &'a str,
    k: usize,
    k1: f64,
    b: f64,
    tokenizer_fingerprint: &'a str,
    queries: usize,
}

fn cmd_search(a: SearchArgs) -> Result<()> {
    let index = load_index(&a.index)?;
    let config = match a.tokenizer {
        Some(t) => a.flags.spec(t.into())?.build()?,
        None => index
            .tokenizer_spec()
            .ok_or_else(|| Error::Config("index records no tokenizer; pass --tokenizer".into()))?
            .build_relative_to(Some(&a.index))?,
    };
    let params = Bm25Params::new(a.k1, a.b)?;
    if a.k == 0 {
        return Err(Error::Config("--k must be at least 1".into()));
    }
    let queries = load_queries(&a.queries)?;
    let tag = a.tag.unwrap_or_else(|| config.mechanism.to_string());
    check_run_tag(&tag)?;
    let run = run_queries(&index, &queries, &config, &params, a.k, &tag, a.threads)?;
    run.save(&a.out)?;
    let meta = RunMeta {
        tag: &tag,
        k: a.k,
        k1: params.k1,
        b: params.b,
        tokenizer_fingerprint: index.tokenizer_fingerprint(),
        queries: queries.len(),
    };
    let meta_path = sidecar(&a.out);
    let mut json = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Invariant(e.to_string()))?;
    json.push(b'\n');
    fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))
}

/// `<run>.meta.json` next to a run file.
pub fn sidecar(run: &Path) -> PathBuf {
    let mut name = run.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    run.with_file_name(name)
}

fn check_run_tag(tag: &str) -> Result<()> {
    if tag.is_empty() || tag.chars().any(char::is_whitespace) {
        return Err(Error::Config(format!("run tag {tag:?} must be non-empty without whitespace")));
    }
    Ok(())
}

fn cmd_train_vocab(a: TrainArgs) -> Result<()> {
    let mut params = TrainerParams::new(a.size);
    params.min_pair_freq = a.min_freq;
    params.lowercase = !a.no_lowercase;
    let mut failure = None;
    let docs = load_corpus(&a.corpus)?.map_while(|d| d.map_err(|e| failure = Some(e)).ok());
    let counts = count_words(docs, params.lowercase);
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = train_from_word_counts(&counts, &params)?;
    save_vocab(&outcome.vocab, &a.out)?;
    log::info!("wrote {} entries after {} merges", outcome.vocab.len(), outcome.merges.len());
    Ok(())
}

fn cmd_fuse(a: FuseArgs) -> Result<()> {
    let run_a = RunFile::load(&a.a)?;
    let run_b = RunFile::load(&a.b)?;
    let params = FusionParams {
        alpha: a.alpha,
        k: a.k,
        mode: match a.mode {
            ModeArg::Minmax => FusionMode::MinMax,
            ModeArg::Raw => FusionMode::Raw,
        },
    };
    let mut fused = fuse(&run_a, &run_b, &params)?;
    if let Some(tag) = a.tag {
        check_run_tag(&tag)?;
        fused.tag = tag;
    }
    fused.save(&a.out)
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let run = RunFile::load(&a.run)?;
    let qrels = load_qrels(&a.qrels)?;
    let metric = match a.metric {
        MetricArg::Mrr => Metric::Mrr,
        MetricArg::Recall => Metric::Recall,
    };
    let report = evaluate(&run, &qrels, a.k, a.rel_threshold);
    if report.excluded_no_relevant > 0 {
        log::warn!("{} judged queries have no relevant documents and were excluded", report.excluded_no_relevant);
    }
    let mut buf = Vec::new();
    report.write_tsv(metric, &mut buf).expect("writing to memory");
    match a.out {
        Some(p) => fs::write(&p, buf).map_err(|e| Error::io(&p, e)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&buf).and_then(|_| lock.flush()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let output = a
        .output
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Error::Config("no output directory: set `output` in the config or pass --output".into()))?;
    let outcome = run_experiment(&cfg, &output, a.threads)?;
    for (tag, r) in &outcome.rows {
        log::info!("{tag}\tMRR@{k}={:.4}\tRecall@{k}={:.4}", r.mrr_at_k, r.recall_at_k, k = cfg.k);
    }
    Ok(())
}

fn absolute(p: &Path) -> Result<PathBuf> {
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    let cwd = std::env::current_dir().map_err(|e| Error::io(".", e))?;
    Ok(cwd.join(p))
}
