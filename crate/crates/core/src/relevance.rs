//! Relevance grades, gain mappings, and labeled result pages.
//!
//! Every judged document carries up to three labels: *topical* relevance
//! (does the document content match the intent), *perceived* relevance
//! (does the snippet look clickable), and *snippet* relevance (does the
//! snippet itself answer the query). All three share the same 0..=4 grade
//! alphabet; absent labels are kept explicit and resolved by each consumer
//! through a [`MissingPolicy`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Highest grade on the 5-point relevance scale.
pub const MAX_GRADE: u8 = 4;

/// Hard cap on result-page and session depth.
pub const DEPTH_CAP: usize = 100;

/// A graded relevance label in `0..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade(u8);

impl Grade {
    /// Builds a grade, rejecting values above [`MAX_GRADE`].
    pub fn new(value: u8) -> Result<Self> {
        if value > MAX_GRADE {
            return Err(Error::Domain(format!(
                "grade {value} out of range 0..={MAX_GRADE}"
            )));
        }
        Ok(Grade(value))
    }

    /// The raw label value.
    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for Grade {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Grade::new(value)
    }
}

/// The three relevance aspects a label can refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aspect {
    /// Match between the query intent and the document content.
    Topical,
    /// How relevant the result snippet looks before clicking.
    Perceived,
    /// How well the snippet itself answers the query.
    Snippet,
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Aspect::Topical => "topical",
            Aspect::Perceived => "perceived",
            Aspect::Snippet => "snippet",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Aspect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "topical" => Ok(Aspect::Topical),
            "perceived" => Ok(Aspect::Perceived),
            "snippet" => Ok(Aspect::Snippet),
            other => Err(Error::Format(format!("unknown aspect '{other}'"))),
        }
    }
}

/// How a consumer treats results whose labels are missing.
///
/// Judgment pools are incomplete in practice, so missing labels are kept
/// explicit in the data and resolved only at the point of use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Fail on any missing label.
    Strict,
    /// Treat a missing label as grade 0.
    #[default]
    Zero,
}

/// Shape of the label-to-utility map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainKind {
    /// `(2^r - 1) / 2^max_grade`, the ERR-style convention.
    Exponential,
    /// `r / max_grade`.
    Linear,
}

impl fmt::Display for GainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainKind::Exponential => write!(f, "exponential"),
            GainKind::Linear => write!(f, "linear"),
        }
    }
}

/// Maps a grade into a utility in `[0, 1]`, monotone with `gain(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GainScheme {
    kind: GainKind,
    max_grade: u8,
}

impl GainScheme {
    /// Builds a gain scheme; `max_grade` must be in `1..=4`.
    pub fn new(kind: GainKind, max_grade: u8) -> Result<Self> {
        if max_grade == 0 || max_grade > MAX_GRADE {
            return Err(Error::Domain(format!(
                "max_grade {max_grade} out of range 1..={MAX_GRADE}"
            )));
        }
        Ok(GainScheme { kind, max_grade })
    }

    /// Exponential scheme over the full 5-point scale.
    pub fn exponential() -> Self {
        GainScheme {
            kind: GainKind::Exponential,
            max_grade: MAX_GRADE,
        }
    }

    /// Linear scheme over the full 5-point scale.
    pub fn linear() -> Self {
        GainScheme {
            kind: GainKind::Linear,
            max_grade: MAX_GRADE,
        }
    }

    /// The scheme kind.
    pub fn kind(&self) -> GainKind {
        self.kind
    }

    /// The top grade this scheme accepts.
    pub fn max_grade(&self) -> u8 {
        self.max_grade
    }

    /// Utility of `grade` under this scheme.
    ///
    /// Errors if the grade exceeds the scheme's `max_grade`.
    pub fn gain(&self, grade: Grade) -> Result<f64> {
        let r = grade.value();
        if r > self.max_grade {
            return Err(Error::Domain(format!(
                "grade {r} exceeds scheme max_grade {}",
                self.max_grade
            )));
        }
        let g = match self.kind {
            GainKind::Exponential => {
                ((1u32 << r) - 1) as f64 / (1u32 << self.max_grade) as f64
            }
            GainKind::Linear => f64::from(r) / f64::from(self.max_grade),
        };
        Ok(g)
    }
}

impl Default for GainScheme {
    fn default() -> Self {
        GainScheme::exponential()
    }
}

/// Utility of `grade` under `scheme`; see [`GainScheme::gain`].
pub fn gain(grade: Grade, scheme: &GainScheme) -> Result<f64> {
    scheme.gain(grade)
}

/// One ranked result with its (possibly missing) aspect labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgedResult {
    doc_id: String,
    rank: usize,
    topical: Option<Grade>,
    perceived: Option<Grade>,
    snippet: Option<Grade>,
}

impl JudgedResult {
    /// Builds a judged result; `rank` is 1-based.
    pub fn new(
        doc_id: impl Into<String>,
        rank: usize,
        topical: Option<Grade>,
        perceived: Option<Grade>,
        snippet: Option<Grade>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Format("rank must be >= 1".into()));
        }
        Ok(JudgedResult {
            doc_id: doc_id.into(),
            rank,
            topical,
            perceived,
            snippet,
        })
    }

    /// The document identifier.
    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    /// 1-based position on the page.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Topical label, if judged.
    pub fn topical(&self) -> Option<Grade> {
        self.topical
    }

    /// Perceived label, if judged.
    pub fn perceived(&self) -> Option<Grade> {
        self.perceived
    }

    /// Snippet label, if judged.
    pub fn snippet(&self) -> Option<Grade> {
        self.snippet
    }

    /// Label for one aspect.
    pub fn label(&self, aspect: Aspect) -> Option<Grade> {
        match aspect {
            Aspect::Topical => self.topical,
            Aspect::Perceived => self.perceived,
            Aspect::Snippet => self.snippet,
        }
    }

    /// Label for one aspect, resolved under `policy`.
    pub fn resolved(&self, aspect: Aspect, policy: MissingPolicy) -> Result<Grade> {
        match (self.label(aspect), policy) {
            (Some(g), _) => Ok(g),
            (None, MissingPolicy::Zero) => Ok(Grade(0)),
            (None, MissingPolicy::Strict) => Err(Error::Evaluation(format!(
                "missing {aspect} label for document '{}' at rank {}",
                self.doc_id, self.rank
            ))),
        }
    }
}

/// An ordered, judged result page for one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSerp {
    query_id: String,
    results: Vec<JudgedResult>,
}

impl LabeledSerp {
    /// Builds a page; results must carry contiguous ranks `1..=N` in order,
    /// with `1 <= N <= DEPTH_CAP`.
    pub fn new(query_id: impl Into<String>, results: Vec<JudgedResult>) -> Result<Self> {
        let query_id = query_id.into();
        if results.is_empty() {
            return Err(Error::Format(format!(
                "query '{query_id}': result page must hold at least one result"
            )));
        }
        if results.len() > DEPTH_CAP {
            return Err(Error::Format(format!(
                "query '{query_id}': result page exceeds depth cap {DEPTH_CAP}"
            )));
        }
        for (i, r) in results.iter().enumerate() {
            if r.rank != i + 1 {
                return Err(Error::Format(format!(
                    "query '{query_id}': expected rank {} at position {}, found rank {}",
                    i + 1,
                    i,
                    r.rank
                )));
            }
        }
        Ok(LabeledSerp { query_id, results })
    }

    /// The query identifier.
    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    /// Results in rank order.
    pub fn results(&self) -> &[JudgedResult] {
        &self.results
    }

    /// Number of results on the page.
    pub fn len(&self) -> usize {
        self.results.len()
    }

    /// Always false; pages hold at least one result.
    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    /// Copy truncated to the top `depth` ranks.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("depth must be >= 1".into()));
        }
        let keep = self.results.len().min(depth);
        Ok(LabeledSerp {
            query_id: self.query_id.clone(),
            results: self.results[..keep].to_vec(),
        })
    }

    /// Copy with every missing label resolved under `policy`.
    ///
    /// With [`MissingPolicy::Zero`] missing labels become grade 0; with
    /// [`MissingPolicy::Strict`] the first missing label is an error.
    pub fn imputed(&self, policy: MissingPolicy) -> Result<Self> {
        let mut results = Vec::with_capacity(self.results.len());
        for r in &self.results {
            results.push(JudgedResult {
                doc_id: r.doc_id.clone(),
                rank: r.rank,
                topical: Some(r.resolved(Aspect::Topical, policy)?),
                perceived: Some(r.resolved(Aspect::Perceived, policy)?),
                snippet: Some(r.resolved(Aspect::Snippet, policy)?),
            });
        }
        Ok(LabeledSerp {
            query_id: self.query_id.clone(),
            results,
        })
    }
}

/// The three labels judged for one (query, document) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelTriple {
    /// Topical label, if judged.
    pub topical: Option<Grade>,
    /// Perceived label, if judged.
    pub perceived: Option<Grade>,
    /// Snippet label, if judged.
    pub snippet: Option<Grade>,
}

/// Aggregated judgments keyed by query and document.
#[derive(Debug, Clone, Default)]
pub struct JudgmentStore {
    by_query: BTreeMap<String, BTreeMap<String, LabelTriple>>,
    duplicates: usize,
}

impl JudgmentStore {
    /// An empty store.
    pub fn new() -> Self {
        JudgmentStore::default()
    }

    /// Inserts labels for `(query_id, doc_id)`. Re-inserting the same pair
    /// replaces the previous labels and bumps the duplicate counter.
    pub fn insert(
        &mut self,
        query_id: impl Into<String>,
        doc_id: impl Into<String>,
        labels: LabelTriple,
    ) {
        let prev = self
            .by_query
            .entry(query_id.into())
            .or_default()
            .insert(doc_id.into(), labels);
        if prev.is_some() {
            self.duplicates += 1;
        }
    }

    /// Labels for `(query_id, doc_id)`, if judged.
    pub fn get(&self, query_id: &str, doc_id: &str) -> Option<&LabelTriple> {
        self.by_query.get(query_id)?.get(doc_id)
    }

    /// Judged documents for one query, in document order.
    pub fn query(&self, query_id: &str) -> Option<&BTreeMap<String, LabelTriple>> {
        self.by_query.get(query_id)
    }

    /// Judged query ids, sorted.
    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.by_query.keys().map(String::as_str)
    }

    /// Total number of judged (query, document) pairs.
    pub fn len(&self) -> usize {
        self.by_query.values().map(BTreeMap::len).sum()
    }

    /// True when no judgments are stored.
    pub fn is_empty(&self) -> bool {
        self.by_query.is_empty()
    }

    /// Number of rows that overwrote an earlier row for the same pair.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }
}
