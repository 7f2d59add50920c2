//! Ranked system runs and their join with judgment pools.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::relevance::{JudgedResult, JudgmentStore, LabeledSerp};

/// One row of a ranked run: a document retrieved for a query.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    /// Query identifier.
    pub query_id: String,
    /// Document identifier.
    pub doc_id: String,
    /// 1-based rank within the query.
    pub rank: usize,
    /// Retrieval score; must be non-increasing in rank.
    pub score: f64,
    /// System tag.
    pub tag: String,
}

/// A system's ranked output over a set of queries.
#[derive(Debug, Clone)]
pub struct RankedRun {
    tag: String,
    by_query: BTreeMap<String, Vec<RunEntry>>,
}

impl RankedRun {
    /// Builds a run from raw entries.
    ///
    /// Per query, ranks must be unique and contiguous from 1, and scores
    /// must be non-increasing in rank order (i.e. the rank order is the
    /// score-descending order).
    pub fn from_entries(entries: Vec<RunEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Format("run holds no entries".into()));
        }
        let tag = entries[0].tag.clone();
        let mut by_query: BTreeMap<String, Vec<RunEntry>> = BTreeMap::new();
        for e in entries {
            by_query.entry(e.query_id.clone()).or_default().push(e);
        }
        for (qid, list) in &mut by_query {
            list.sort_by_key(|e| e.rank);
            let mut docs: Vec<&str> = list.iter().map(|e| e.doc_id.as_str()).collect();
            docs.sort_unstable();
            if let Some(dup) = docs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Format(format!(
                    "query '{qid}': document '{}' retrieved twice",
                    dup[0]
                )));
            }
            for (i, e) in list.iter().enumerate() {
                if e.rank != i + 1 {
                    let what = if i > 0 && list[i - 1].rank == e.rank {
                        "duplicate"
                    } else {
                        "non-contiguous"
                    };
                    return Err(Error::Format(format!(
                        "query '{qid}': {what} rank {} in run",
                        e.rank
                    )));
                }
                if i > 0 && e.score > list[i - 1].score {
                    return Err(Error::Format(format!(
                        "query '{qid}': score increases from rank {} to {}",
                        i,
                        i + 1
                    )));
                }
            }
        }
        Ok(RankedRun { tag, by_query })
    }

    /// The run's system tag (taken from its first entry).
    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Query ids present in the run, sorted.
    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.by_query.keys().map(String::as_str)
    }

    /// Ranked entries for one query.
    pub fn ranking(&self, query_id: &str) -> Option<&[RunEntry]> {
        self.by_query.get(query_id).map(Vec::as_slice)
    }

    /// Number of queries in the run.
    pub fn num_queries(&self) -> usize {
        self.by_query.len()
    }
}

/// Joins a run with a judgment pool into one labeled page per query.
///
/// Pages are truncated to `depth`; documents absent from the pool keep all
/// labels missing. Resolution of missing labels is left to consumers.
pub fn join(run: &RankedRun, judgments: &JudgmentStore, depth: usize) -> Result<Vec<LabeledSerp>> {
    if depth == 0 {
        return Err(Error::Config("join depth must be >= 1".into()));
    }
    let mut serps = Vec::with_capacity(run.num_queries());
    for (qid, entries) in &run.by_query {
        let mut results = Vec::new();
        for e in entries.iter().take(depth) {
            let labels = judgments.get(qid, &e.doc_id).copied().unwrap_or_default();
            results.push(JudgedResult::new(
                e.doc_id.clone(),
                e.rank,
                labels.topical,
                labels.perceived,
                labels.snippet,
            )?);
        }
        serps.push(LabeledSerp::new(qid.clone(), results)?);
    }
    Ok(serps)
}
