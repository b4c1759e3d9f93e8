//! Weighted combination of two runs.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::retrieval::{top_k, RunFile, ScoredDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    /// Per-query min-max normalization of each run before mixing.
    #[default]
    MinMax,
    /// Mix raw scores; absent documents contribute 0.
    Raw,
}

impl FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(FusionMode::MinMax),
            "raw" => Ok(FusionMode::Raw),
            other => Err(Error::Config(format!("unknown fusion mode {other:?}"))),
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionMode::MinMax => "minmax",
            FusionMode::Raw => "raw",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionParams {
    pub alpha: f64,
    pub k: usize,
    #[serde(default)]
    pub mode: FusionMode,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self { alpha: 0.5, k: 100, mode: FusionMode::MinMax }
    }
}

impl FusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Maps each doc to its score scaled into [0, 1] over this list. Lists with
/// fewer than two distinct scores map every doc to 1.
pub fn min_max(docs: &[ScoredDoc]) -> HashMap<&str, f64> {
    let lo = docs.iter().map(|d| d.score).fold(f64::INFINITY, f64::min);
    let hi = docs.iter().map(|d| d.score).fold(f64::NEG_INFINITY, f64::max);
    docs.iter()
        .map(|d| {
            let v = if hi > lo { (d.score - lo) / (hi - lo) } else { 1.0 };
            (d.doc_id.as_str(), v)
        })
        .collect()
}

fn check_unique(run: &RunFile, qid: &str, docs: &[ScoredDoc]) -> Result<()> {
    let mut seen = HashSet::with_capacity(docs.len());
    for d in docs {
        if !seen.insert(d.doc_id.as_str()) {
            return Err(Error::Input(format!(
                "document {:?} appears twice for query {qid:?} in run {:?}",
                d.doc_id, run.tag
            )));
        }
    }
    Ok(())
}

/// Fuses two runs query by query.
///
/// Queries appear in `run_a`'s order followed by any only in `run_b`.
pub fn fuse(run_a: &RunFile, run_b: &RunFile, params: &FusionParams) -> Result<RunFile> {
    params.validate()?;
    let b_lists: HashMap<&str, &[ScoredDoc]> = run_b.queries.iter().map(|(q, d)| (q.as_str(), d.as_slice())).collect();
    let mut order: Vec<&str> = run_a.queries.iter().map(|(q, _)| q.as_str()).collect();
    let in_a: HashSet<&str> = order.iter().copied().collect();
    order.extend(run_b.queries.iter().map(|(q, _)| q.as_str()).filter(|q| !in_a.contains(q)));
    let a_lists: HashMap<&str, &[ScoredDoc]> = run_a.queries.iter().map(|(q, d)| (q.as_str(), d.as_slice())).collect();

    let mut out = RunFile::new(format!("fuse({},{},{})", run_a.tag, run_b.tag, params.alpha));
    for qid in order {
        let a = a_lists.get(qid).copied().unwrap_or(&[]);
        let b = b_lists.get(qid).copied().unwrap_or(&[]);
        check_unique(run_a, qid, a)?;
        check_unique(run_b, qid, b)?;
        let (na, nb) = match params.mode {
            FusionMode::MinMax => (min_max(a), min_max(b)),
            FusionMode::Raw => (raw(a), raw(b)),
        };
        let mut candidates: Vec<&str> = a.iter().chain(b).map(|d| d.doc_id.as_str()).collect();
        candidates.sort_unstable();
        candidates.dedup();
        let scored = candidates
            .into_iter()
            .map(|d| {
                let sa = na.get(d).copied().unwrap_or(0.0);
                let sb = nb.get(d).copied().unwrap_or(0.0);
                (d.to_string(), params.alpha * sa + (1.0 - params.alpha) * sb)
            })
            .collect();
        out.queries.push((qid.to_string(), top_k(scored, params.k)));
    }
    Ok(out)
}

fn raw(docs: &[ScoredDoc]) -> HashMap<&str, f64> {
    docs.iter().map(|d| (d.doc_id.as_str(), d.score)).collect()
}
