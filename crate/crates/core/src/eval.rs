//! MRR@k and Recall@k, normalized score tables, and Pearson correlation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Qrels;
use crate::error::{Error, Result};
use crate::retrieval::{RunFile, ScoredDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Mrr,
    Recall,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mrr" => Ok(Metric::Mrr),
            "recall" => Ok(Metric::Recall),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Mrr => "mrr",
            Metric::Recall => "recall",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryEval {
    pub query_id: String,
    pub reciprocal_rank: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub k: usize,
    pub rel_threshold: u32,
    /// Evaluated queries in qrels order.
    pub per_query: Vec<QueryEval>,
    pub mrr_at_k: f64,
    pub recall_at_k: f64,
    /// Judged queries skipped because none of their documents reaches the threshold.
    pub excluded_no_relevant: usize,
    /// Run queries that have no judgments at all.
    pub unjudged_run_queries: Vec<String>,
}

impl EvalReport {
    pub fn num_evaluated(&self) -> usize {
        self.per_query.len()
    }

    pub fn aggregate(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Mrr => self.mrr_at_k,
            Metric::Recall => self.recall_at_k,
        }
    }

    /// `query_id<TAB>value` per query, then an `ALL` row with the mean.
    pub fn write_tsv<W: Write>(&self, metric: Metric, mut out: W) -> std::io::Result<()> {
        let name = format!("{metric}@{}", self.k);
        writeln!(out, "query_id\t{name}")?;
        for q in &self.per_query {
            let v = match metric {
                Metric::Mrr => q.reciprocal_rank,
                Metric::Recall => q.recall,
            };
            writeln!(out, "{}\t{v:.6}", q.query_id)?;
        }
        writeln!(out, "ALL\t{:.6}", self.aggregate(metric))?;
        out.flush()
    }
}

/// Evaluates `run` over every qrels query with at least one relevant
/// document. Such a query absent from the run scores 0.
pub fn evaluate(run: &RunFile, qrels: &Qrels, k: usize, rel_threshold: u32) -> EvalReport {
    let lists: BTreeMap<&str, &[ScoredDoc]> = run.queries.iter().map(|(q, d)| (q.as_str(), d.as_slice())).collect();
    let unjudged: Vec<String> =
        run.queries.iter().filter(|(q, _)| !qrels.contains_query(q)).map(|(q, _)| q.clone()).collect();
    for q in &unjudged {
        log::warn!("query {q:?} in run {:?} has no judgments; excluded", run.tag);
    }

    let mut per_query = Vec::new();
    let mut excluded = 0;
    for qid in qrels.query_ids() {
        let relevant = qrels.num_relevant(qid, rel_threshold);
        if relevant == 0 {
            excluded += 1;
            continue;
        }
        let docs = lists.get(qid).copied().unwrap_or(&[]);
        let top = &docs[..docs.len().min(k)];
        let mut rr = 0.0;
        let mut hits = 0usize;
        for (i, d) in top.iter().enumerate() {
            if qrels.is_relevant(qid, &d.doc_id, rel_threshold) {
                if hits == 0 {
                    rr = 1.0 / (i + 1) as f64;
                }
                hits += 1;
            }
        }
        per_query.push(QueryEval {
            query_id: qid.to_string(),
            reciprocal_rank: rr,
            recall: hits as f64 / relevant as f64,
        });
    }

    let n = per_query.len();
    let mean = |f: fn(&QueryEval) -> f64| {
        if n == 0 {
            0.0
        } else {
            per_query.iter().map(f).sum::<f64>() / n as f64
        }
    };
    EvalReport {
        k,
        rel_threshold,
        mrr_at_k: mean(|q| q.reciprocal_rank),
        recall_at_k: mean(|q| q.recall),
        per_query,
        excluded_no_relevant: excluded,
        unjudged_run_queries: unjudged,
    }
}

pub fn mrr_at_k(run: &RunFile, qrels: &Qrels, k: usize, rel_threshold: u32) -> EvalReport {
    evaluate(run, qrels, k, rel_threshold)
}

pub fn recall_at_k(run: &RunFile, qrels: &Qrels, k: usize, rel_threshold: u32) -> EvalReport {
    evaluate(run, qrels, k, rel_threshold)
}

/// Effectiveness of several systems on one language.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageStats {
    pub language: String,
    pub wiki_article_count: u64,
    pub scores: BTreeMap<String, f64>,
}

/// Reads `language<TAB>article_count<TAB>system_tag<TAB>mrr` rows. A header
/// line starting with `language` is skipped. Languages keep first-seen order.
pub fn parse_language_stats<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<LanguageStats>> {
    let mut out: Vec<LanguageStats> = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::format(source_name, line_no, e.to_string()))?;
        if line.trim().is_empty() || (line_no == 1 && line.starts_with("language\t")) {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::format(
                source_name,
                line_no,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        let count: u64 = cols[1].parse().ok().filter(|&c| c > 0).ok_or_else(|| {
            Error::format(source_name, line_no, format!("article count must be a positive integer, got {:?}", cols[1]))
        })?;
        let mrr: f64 = cols[3]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::format(source_name, line_no, format!("bad score {:?}", cols[3])))?;
        let entry = match out.iter_mut().position(|l| l.language == cols[0]) {
            Some(i) => &mut out[i],
            None => {
                out.push(LanguageStats {
                    language: cols[0].to_string(),
                    wiki_article_count: count,
                    scores: BTreeMap::new(),
                });
                out.last_mut().expect("just pushed")
            }
        };
        if entry.wiki_article_count != count {
            return Err(Error::format(source_name, line_no, format!("conflicting article counts for {:?}", cols[0])));
        }
        if entry.scores.insert(cols[2].to_string(), mrr).is_some() {
            return Err(Error::format(
                source_name,
                line_no,
                format!("duplicate score for {:?}/{:?}", cols[0], cols[2]),
            ));
        }
    }
    Ok(out)
}

pub fn load_language_stats(path: impl AsRef<Path>) -> Result<Vec<LanguageStats>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    parse_language_stats(BufReader::new(file), &path.display().to_string())
}

pub fn write_language_stats<W: Write>(stats: &[LanguageStats], mut out: W) -> std::io::Result<()> {
    writeln!(out, "language\tarticle_count\tsystem_tag\tmrr")?;
    for l in stats {
        for (tag, v) in &l.scores {
            writeln!(out, "{}\t{}\t{tag}\t{v:.6}", l.language, l.wiki_article_count)?;
        }
    }
    out.flush()
}

/// Language → system → score divided by that language's reference score.
pub type NormalizedTable = BTreeMap<String, BTreeMap<String, f64>>;

/// Divides each language's scores by the score of its reference system.
/// Languages without an entry in `reference` use `default_reference`.
pub fn normalize_scores(
    stats: &[LanguageStats],
    reference: &BTreeMap<String, String>,
    default_reference: &str,
) -> Result<NormalizedTable> {
    let mut table = NormalizedTable::new();
    for l in stats {
        let ref_tag = reference.get(&l.language).map_or(default_reference, String::as_str);
        let denom = l
            .scores
            .get(ref_tag)
            .copied()
            .filter(|&v| v > 0.0)
            .ok_or_else(|| Error::MissingReference(l.language.clone()))?;
        let row =
            l.scores.iter().map(|(tag, &v)| (tag.clone(), if tag == ref_tag { 1.0 } else { v / denom })).collect();
        table.insert(l.language.clone(), row);
    }
    Ok(table)
}

/// Sample Pearson correlation, clamped to [-1, 1].
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::UndefinedCorrelation(format!("series lengths differ ({} vs {})", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("an input series is constant".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// One system's correlation between log article count and normalized score.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub system: String,
    pub languages: Vec<String>,
    /// `None` when the correlation is undefined (fewer than two languages or
    /// a constant series, as for the reference system itself).
    pub r: Option<f64>,
}

/// Correlates `ln(article_count)` with each system's normalized score.
/// Languages listed in `exclude` are left out, as are languages that lack
/// the system.
pub fn size_correlations(stats: &[LanguageStats], table: &NormalizedTable, exclude: &[String]) -> Vec<Correlation> {
    let systems: std::collections::BTreeSet<&String> = table.values().flat_map(|row| row.keys()).collect();
    let mut out = Vec::new();
    for sys in systems {
        let mut languages = Vec::new();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for l in stats {
            if exclude.contains(&l.language) {
                continue;
            }
            if let Some(&v) = table.get(&l.language).and_then(|row| row.get(sys)) {
                languages.push(l.language.clone());
                xs.push((l.wiki_article_count as f64).ln());
                ys.push(v);
            }
        }
        let r = match pearson_r(&xs, &ys) {
            Ok(r) => Some(r),
            Err(e) => {
                log::info!("no correlation for {sys}: {e}");
                None
            }
        };
        out.push(Correlation { system: sys.clone(), languages, r });
    }
    out
}
