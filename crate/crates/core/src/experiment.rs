//! The full comparison pipeline driven by a TOML file.
//!
//! ```toml
//! corpus = "corpus.jsonl"
//! queries = "queries.tsv"
//! qrels = "qrels.txt"
//! output = "out"            # optional; may be overridden by the caller
//! k = 100
//! language = "sw"
//! article_count = 60000     # lets this run join `language_stats`
//! language_stats = "wiki.tsv"
//! reference = "analyzer"    # normalization reference tag
//!
//! [reference_by_language]
//! sw = "whitespace"
//!
//! [bm25]
//! k1 = 0.9
//! b = 0.4
//!
//! [fusion]
//! alpha = 0.5
//!
//! [[system]]
//! tag = "whitespace"
//! tokenizer = "whitespace"
//!
//! [[system]]
//! tag = "wordpiece"
//! tokenizer = "wordpiece"
//! vocab = "vocab.txt"       # or `train_size = 2000` to learn one from the corpus
//!
//! [[fuse]]
//! a = "analyzer"
//! b = "wordpiece"
//! tag = "hybrid"
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::corpus::{load_corpus, load_qrels, load_queries, Document};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate, load_language_stats, normalize_scores, size_correlations, EvalReport, LanguageStats, Metric,
};
use crate::fusion::{fuse, FusionParams};
use crate::index::{build_index, save_index, IndexOptions};
use crate::retrieval::{run_queries, Bm25Params, RunFile};
use crate::tokenize::{save_vocab, train_wordpiece, Mechanism, TokenizerSpec, TrainerParams};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub queries: PathBuf,
    pub qrels: PathBuf,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_threshold")]
    pub rel_threshold: u32,
    #[serde(default = "default_language")]
    pub language: String,
    #[serde(default)]
    pub article_count: Option<u64>,
    #[serde(default = "default_true")]
    pub include_title: bool,
    #[serde(default)]
    pub bm25: Bm25Section,
    #[serde(default)]
    pub fusion: FusionSection,
    #[serde(rename = "system")]
    pub systems: Vec<SystemConfig>,
    #[serde(default, rename = "fuse")]
    pub fusions: Vec<FuseConfig>,
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default)]
    pub reference_by_language: BTreeMap<String, String>,
    #[serde(default)]
    pub language_stats: Option<PathBuf>,
    /// Languages left out of the size correlation in addition to those
    /// normalized against a non-default reference.
    #[serde(default)]
    pub exclude_from_correlation: Vec<String>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bm25Section {
    #[serde(default = "default_k1")]
    pub k1: f64,
    #[serde(default = "default_b")]
    pub b: f64,
}

impl Default for Bm25Section {
    fn default() -> Self {
        let p = Bm25Params::default();
        Self { k1: p.k1, b: p.b }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub mode: crate::fusion::FusionMode,
}

impl Default for FusionSection {
    fn default() -> Self {
        let p = FusionParams::default();
        Self { alpha: p.alpha, mode: p.mode }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub tag: String,
    pub tokenizer: Mechanism,
    #[serde(default)]
    pub vocab: Option<PathBuf>,
    /// Train a vocabulary of this size from the corpus instead of loading one.
    #[serde(default)]
    pub train_size: Option<usize>,
    #[serde(default = "default_min_pair_freq")]
    pub min_pair_freq: u64,
    #[serde(default)]
    pub lowercase: Option<bool>,
    #[serde(default)]
    pub keep_unk: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuseConfig {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub tag: Option<String>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

fn default_k() -> usize {
    100
}
fn default_threshold() -> u32 {
    1
}
fn default_language() -> String {
    "default".into()
}
fn default_true() -> bool {
    true
}
fn default_k1() -> f64 {
    Bm25Params::default().k1
}
fn default_b() -> f64 {
    Bm25Params::default().b
}
fn default_alpha() -> f64 {
    FusionParams::default().alpha
}
fn default_min_pair_freq() -> u64 {
    2
}

impl ExperimentConfig {
    /// Parses TOML and resolves relative paths against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        resolve(&mut cfg.corpus);
        resolve(&mut cfg.queries);
        resolve(&mut cfg.qrels);
        for p in [&mut cfg.output, &mut cfg.language_stats].into_iter().flatten() {
            resolve(p);
        }
        for p in cfg.systems.iter_mut().filter_map(|s| s.vocab.as_mut()) {
            resolve(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::io(path, e),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn bm25(&self) -> Bm25Params {
        Bm25Params { k1: self.bm25.k1, b: self.bm25.b }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.systems.is_empty() {
            return Err(Error::Config("at least one [[system]] is required".into()));
        }
        self.bm25().validate()?;
        FusionParams { alpha: self.fusion.alpha, k: self.k, mode: self.fusion.mode }.validate()?;
        for p in [&self.corpus, &self.queries, &self.qrels] {
            if !p.exists() {
                return Err(Error::MissingFile(p.clone()));
            }
        }
        let mut tags: HashSet<String> = HashSet::new();
        for s in &self.systems {
            check_tag(&s.tag)?;
            if !tags.insert(s.tag.clone()) {
                return Err(Error::Config(format!("duplicate system tag {:?}", s.tag)));
            }
            if s.tokenizer == Mechanism::WordPiece && s.vocab.is_none() == s.train_size.is_none() {
                return Err(Error::Config(format!("system {:?} needs exactly one of `vocab` or `train_size`", s.tag)));
            }
            if s.tokenizer != Mechanism::WordPiece && (s.vocab.is_some() || s.train_size.is_some()) {
                return Err(Error::Config(format!("system {:?}: only wordpiece takes a vocabulary", s.tag)));
            }
        }
        for f in &self.fusions {
            for side in [&f.a, &f.b] {
                if !self.systems.iter().any(|s| &s.tag == side) {
                    return Err(Error::Config(format!("fusion refers to unknown system {side:?}")));
                }
            }
            let tag = fusion_tag(f);
            check_tag(&tag)?;
            if !tags.insert(tag.clone()) {
                return Err(Error::Config(format!("duplicate tag {tag:?}")));
            }
        }
        Ok(())
    }

    /// The reference tag for languages without an override.
    pub fn default_reference(&self) -> String {
        self.reference.clone().unwrap_or_else(|| {
            self.systems.iter().find(|s| s.tokenizer == Mechanism::Analyzer).unwrap_or(&self.systems[0]).tag.clone()
        })
    }
}

fn fusion_tag(f: &FuseConfig) -> String {
    f.tag.clone().unwrap_or_else(|| format!("{}+{}", f.a, f.b))
}

/// Tags become file names, so keep them to a portable alphabet.
fn check_tag(tag: &str) -> Result<()> {
    let ok = !tag.is_empty()
        && tag != "."
        && tag != ".."
        && tag.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '+'));
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("tag {tag:?} may only contain ASCII letters, digits, '-', '_', '.', '+'")))
    }
}

/// Files written by [`run_experiment`], relative to the output directory.
pub const TABLE_FILE: &str = "table.tsv";
pub const NORMALIZED_FILE: &str = "normalized.tsv";
pub const CORRELATION_FILE: &str = "correlation.tsv";

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub output: PathBuf,
    /// Systems then fusions, in config order.
    pub rows: Vec<(String, EvalReport)>,
}

/// Runs the whole pipeline, writing into `output`.
pub fn run_experiment(cfg: &ExperimentConfig, output: &Path, threads: Option<usize>) -> Result<ExperimentOutcome> {
    for sub in ["index", "runs", "eval", "vocab"] {
        let d = output.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let docs: Vec<Document> = load_corpus(&cfg.corpus)?.collect::<Result<_>>()?;
    let queries = load_queries(&cfg.queries)?;
    let qrels = load_qrels(&cfg.qrels)?;
    let params = cfg.bm25();
    log::info!("{} documents, {} queries", docs.len(), queries.len());

    let mut runs: BTreeMap<String, RunFile> = BTreeMap::new();
    let mut rows = Vec::new();
    for sys in &cfg.systems {
        let index_dir = output.join("index").join(&sys.tag);
        let (spec, tokenizer) = match (sys.tokenizer, &sys.vocab, sys.train_size) {
            (Mechanism::WordPiece, None, Some(size)) => {
                let mut tp = TrainerParams::new(size);
                tp.min_pair_freq = sys.min_pair_freq;
                tp.lowercase = sys.lowercase.unwrap_or(true);
                let vocab = train_wordpiece(docs.iter().cloned(), &tp)?;
                let vocab_path = output.join("vocab").join(format!("{}.txt", sys.tag));
                save_vocab(&vocab, &vocab_path)?;
                log::info!("trained {} entries for {}", vocab.len(), sys.tag);
                // Stored relative to the index directory so the output tree can move.
                let rel = PathBuf::from("../../vocab").join(format!("{}.txt", sys.tag));
                let spec = TokenizerSpec::new(Mechanism::WordPiece, Some(rel), sys.lowercase, !sys.keep_unk);
                let config = crate::tokenize::TokenizerConfig::wordpiece(Arc::new(vocab))
                    .with_lowercase(spec.lowercase)
                    .with_drop_unknown(spec.drop_unknown);
                (spec, config)
            }
            _ => {
                let vocab = sys.vocab.as_ref().map(|p| absolute(p));
                let spec = TokenizerSpec::new(sys.tokenizer, vocab, sys.lowercase, !sys.keep_unk);
                let config = spec.build()?;
                (spec, config)
            }
        };
        let options = IndexOptions { include_title: cfg.include_title, threads };
        let mut index = build_index(docs.iter().cloned().map(Ok), &tokenizer, options)?;
        index.set_tokenizer_spec(Some(spec));
        save_index(&index, &index_dir)?;
        let run = run_queries(&index, &queries, &tokenizer, &params, cfg.k, &sys.tag, threads)?;
        run.save(output.join("runs").join(format!("{}.trec", sys.tag)))?;
        let report = evaluate(&run, &qrels, cfg.k, cfg.rel_threshold);
        write_report(output, &sys.tag, &report)?;
        log::info!("{}: MRR@{k} {:.4} R@{k} {:.4}", sys.tag, report.mrr_at_k, report.recall_at_k, k = cfg.k);
        rows.push((sys.tag.clone(), report));
        runs.insert(sys.tag.clone(), run);
    }

    for f in &cfg.fusions {
        let tag = fusion_tag(f);
        let fp = FusionParams { alpha: f.alpha.unwrap_or(cfg.fusion.alpha), k: cfg.k, mode: cfg.fusion.mode };
        let mut run = fuse(&runs[&f.a], &runs[&f.b], &fp)?;
        run.tag = tag.clone();
        run.save(output.join("runs").join(format!("{tag}.trec")))?;
        let report = evaluate(&run, &qrels, cfg.k, cfg.rel_threshold);
        write_report(output, &tag, &report)?;
        rows.push((tag.clone(), report));
        runs.insert(tag, run);
    }

    write_table(&output.join(TABLE_FILE), cfg.k, &rows)?;

    let this_language = LanguageStats {
        language: cfg.language.clone(),
        wiki_article_count: cfg.article_count.unwrap_or(1),
        scores: rows.iter().map(|(t, r)| (t.clone(), r.mrr_at_k)).collect(),
    };
    let mut languages = match &cfg.language_stats {
        Some(p) => load_language_stats(p)?,
        None => Vec::new(),
    };
    languages.retain(|l| l.language != cfg.language);
    languages.push(this_language);

    let default_ref = cfg.default_reference();
    let table = normalize_scores(&languages, &cfg.reference_by_language, &default_ref)?;
    write_normalized(&output.join(NORMALIZED_FILE), &languages, &table, cfg, &default_ref)?;

    if cfg.language_stats.is_some() {
        let mut exclude = cfg.exclude_from_correlation.clone();
        exclude.extend(cfg.reference_by_language.iter().filter(|(_, r)| **r != default_ref).map(|(l, _)| l.clone()));
        if cfg.article_count.is_none() {
            exclude.push(cfg.language.clone());
        }
        let corr = size_correlations(&languages, &table, &exclude);
        let mut out = String::from("system\tnum_languages\tlanguages\tpearson_r\n");
        for c in corr {
            let r = c.r.map_or_else(|| "NA".to_string(), |r| format!("{r:.6}"));
            out.push_str(&format!("{}\t{}\t{}\t{r}\n", c.system, c.languages.len(), c.languages.join(",")));
        }
        write_text(&output.join(CORRELATION_FILE), &out)?;
    }

    Ok(ExperimentOutcome { output: output.to_path_buf(), rows })
}

fn absolute(p: &Path) -> PathBuf {
    let joined = if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.to_path_buf())
    };
    // Lexical cleanup only; the file may legitimately be a symlink.
    let mut out = PathBuf::new();
    for c in joined.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_report(output: &Path, tag: &str, report: &EvalReport) -> Result<()> {
    for metric in [Metric::Mrr, Metric::Recall] {
        let path = output.join("eval").join(format!("{tag}.{metric}.tsv"));
        let mut buf = Vec::new();
        report.write_tsv(metric, &mut buf).map_err(|e| Error::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// One row per system: `system<TAB>MRR@k<TAB>Recall@k<TAB>queries`.
fn write_table(path: &Path, k: usize, rows: &[(String, EvalReport)]) -> Result<()> {
    let mut buf = Vec::new();
    let io = |e| Error::io(path, e);
    writeln!(buf, "system\tMRR@{k}\tRecall@{k}\tqueries").map_err(io)?;
    for (tag, r) in rows {
        writeln!(buf, "{tag}\t{:.6}\t{:.6}\t{}", r.mrr_at_k, r.recall_at_k, r.num_evaluated()).map_err(io)?;
    }
    fs::write(path, buf).map_err(io)
}

/// `language<TAB>reference<TAB>system<TAB>mrr<TAB>normalized`.
fn write_normalized(
    path: &Path,
    languages: &[LanguageStats],
    table: &crate::eval::NormalizedTable,
    cfg: &ExperimentConfig,
    default_ref: &str,
) -> Result<()> {
    let mut out = String::from("language\treference\tsystem\tmrr\tnormalized\n");
    for l in languages {
        let reference = cfg.reference_by_language.get(&l.language).map_or(default_ref, String::as_str);
        for (sys, raw) in &l.scores {
            let norm = table[&l.language][sys];
            out.push_str(&format!("{}\t{reference}\t{sys}\t{raw:.6}\t{norm:.6}\n", l.language));
        }
    }
    write_text(path, &out)
}
