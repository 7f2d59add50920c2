//! Per-query aggregation, system comparison, correlation with online click
//! metrics, and multi-rater label aggregation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use crate::click_models::ClickModelParams;
use crate::error::{Error, Result};
use crate::estimation::Session;
use crate::metrics::{self, MetricKind, MetricSpec};
use crate::relevance::{Grade, JudgmentStore, LabeledSerp, MissingPolicy, MAX_GRADE};
use crate::run::{join, RankedRun};

const GRADES: usize = MAX_GRADE as usize + 1;

/// Per-query and aggregate values of one metric for one run.
#[derive(Debug, Clone)]
pub struct MetricReport {
    run_tag: String,
    metric: MetricKind,
    per_query: BTreeMap<String, f64>,
    aggregate: f64,
}

impl MetricReport {
    /// Builds a report; the aggregate is the unweighted mean over queries.
    pub fn new(
        run_tag: impl Into<String>,
        metric: MetricKind,
        per_query: BTreeMap<String, f64>,
    ) -> Result<Self> {
        if per_query.is_empty() {
            return Err(Error::Analysis("report holds no queries".into()));
        }
        let aggregate = per_query.values().sum::<f64>() / per_query.len() as f64;
        Ok(MetricReport {
            run_tag: run_tag.into(),
            metric,
            per_query,
            aggregate,
        })
    }

    /// The run's system tag.
    pub fn run_tag(&self) -> &str {
        &self.run_tag
    }

    /// Which metric was computed.
    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    /// Per-query values, sorted by query id.
    pub fn per_query(&self) -> &BTreeMap<String, f64> {
        &self.per_query
    }

    /// Mean over queries.
    pub fn aggregate(&self) -> f64 {
        self.aggregate
    }
}

/// Evaluates one already-resolved page under `spec`.
///
/// Labels must be present on every aspect the metric consumes; apply an
/// imputation policy first when the pool is incomplete.
pub fn evaluate_serp(
    serp: &LabeledSerp,
    spec: &MetricSpec,
    params: Option<&ClickModelParams>,
) -> Result<f64> {
    fn need(
        params: Option<&ClickModelParams>,
        kind: MetricKind,
    ) -> Result<&ClickModelParams> {
        params.ok_or_else(|| {
            Error::Config(format!("metric {kind} requires click model parameters"))
        })
    }
    match spec.kind {
        MetricKind::UMetricGeneric => Err(Error::Config(
            "the generic metric needs an explicit profile; call u_metric directly".into(),
        )),
        MetricKind::UDcm => metrics::u_dcm(serp, need(params, spec.kind)?, spec),
        MetricKind::UDcmS => metrics::u_dcm_s(serp, need(params, spec.kind)?, spec),
        MetricKind::UDbn => metrics::u_dbn(serp, need(params, spec.kind)?, spec),
        MetricKind::UDbnS => metrics::u_dbn_s(serp, need(params, spec.kind)?, spec),
        MetricKind::Dcg => metrics::dcg(serp, spec),
        MetricKind::Err => metrics::err(serp, spec),
    }
}

/// Joins a run with the pool, resolves missing labels under `missing`, and
/// computes `spec.kind` per query.
pub fn evaluate_run(
    run: &RankedRun,
    judgments: &JudgmentStore,
    spec: &MetricSpec,
    params: Option<&ClickModelParams>,
    missing: MissingPolicy,
) -> Result<MetricReport> {
    let mut per_query = BTreeMap::new();
    for serp in join(run, judgments, spec.depth)? {
        let resolved = serp.imputed(missing)?;
        let value = evaluate_serp(&resolved, spec, params)?;
        per_query.insert(resolved.query_id().to_string(), value);
    }
    MetricReport::new(run.tag(), spec.kind, per_query)
}

/// Session-level click metrics for one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineMetrics {
    /// Fraction of sessions with at least one click.
    pub uctr: f64,
    /// Mean reciprocal rank of the first click, over clicked sessions.
    pub max_rr: Option<f64>,
    /// Mean reciprocal rank of the last click, over clicked sessions.
    pub min_rr: Option<f64>,
    /// Mean over clicked sessions of that session's mean reciprocal click
    /// rank.
    pub mean_rr: Option<f64>,
    /// Number of sessions observed for the query.
    pub sessions: usize,
}

/// Computes online click metrics per query. Queries without any clicked
/// session report the reciprocal-rank metrics as missing.
pub fn online_metrics(sessions: &[Session]) -> BTreeMap<String, OnlineMetrics> {
    let mut grouped: BTreeMap<&str, Vec<&Session>> = BTreeMap::new();
    for s in sessions {
        grouped.entry(s.query_id()).or_default().push(s);
    }
    let mut out = BTreeMap::new();
    for (qid, group) in grouped {
        let total = group.len();
        let clicked: Vec<&&Session> = group.iter().filter(|s| s.has_click()).collect();
        let uctr = clicked.len() as f64 / total as f64;
        let (max_rr, min_rr, mean_rr) = if clicked.is_empty() {
            (None, None, None)
        } else {
            let m = clicked.len() as f64;
            let mut first = 0.0;
            let mut last = 0.0;
            let mut mean = 0.0;
            for s in &clicked {
                let ranks: Vec<usize> = s
                    .clicks()
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c)
                    .map(|(i, _)| i + 1)
                    .collect();
                first += 1.0 / ranks[0] as f64;
                last += 1.0 / ranks[ranks.len() - 1] as f64;
                mean += ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64;
            }
            (Some(first / m), Some(last / m), Some(mean / m))
        };
        out.insert(
            qid.to_string(),
            OnlineMetrics {
                uctr,
                max_rr,
                min_rr,
                mean_rr,
                sessions: total,
            },
        );
    }
    out
}

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Analysis(format!("{name} holds a non-finite value")));
    }
    Ok(())
}

/// Tie-aware Kendall rank correlation (tau-b) between paired samples.
///
/// Discordant pairs are counted with an `O(n log n)` merge sort; the
/// `O(n^2)` definitional count is kept to the tests as an oracle.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Analysis(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "kendall tau needs at least two pairs".into(),
        ));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        x[i].partial_cmp(&x[j])
            .expect("finite")
            .then(y[i].partial_cmp(&y[j]).expect("finite"))
    });

    let tie_pairs = |sorted: &[f64]| -> f64 {
        let mut pairs = 0.0;
        let mut run = 1.0;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1.0;
            } else {
                pairs += run * (run - 1.0) / 2.0;
                run = 1.0;
            }
        }
        pairs + run * (run - 1.0) / 2.0
    };

    // ties in x and joint ties, walked over the (x, y)-sorted order
    let mut n1 = 0.0;
    let mut n3 = 0.0;
    {
        let mut x_run = 1.0;
        let mut xy_run = 1.0;
        for w in idx.windows(2) {
            let same_x = x[w[0]] == x[w[1]];
            let same_xy = same_x && y[w[0]] == y[w[1]];
            if same_x {
                x_run += 1.0;
            } else {
                n1 += x_run * (x_run - 1.0) / 2.0;
                x_run = 1.0;
            }
            if same_xy {
                xy_run += 1.0;
            } else {
                n3 += xy_run * (xy_run - 1.0) / 2.0;
                xy_run = 1.0;
            }
        }
        n1 += x_run * (x_run - 1.0) / 2.0;
        n3 += xy_run * (xy_run - 1.0) / 2.0;
    }

    let mut y_sorted: Vec<f64> = y.to_vec();
    y_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n2 = tie_pairs(&y_sorted);

    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let discordant = count_inversions(&mut ys);

    let n0 = n as f64 * (n as f64 - 1.0) / 2.0;
    let concordant = n0 - n1 - n2 + n3 - discordant;
    let denom = ((n0 - n1) * (n0 - n2)).sqrt();
    if denom == 0.0 {
        return Err(Error::Analysis(
            "kendall tau undefined: one sample has no variation".into(),
        ));
    }
    Ok((concordant - discordant) / denom)
}

/// Counts pairs `i < j` with `v[i] > v[j]` (strict), sorting `v` in place.
fn count_inversions(v: &mut [f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let mid = n / 2;
    let (left, right) = v.split_at_mut(mid);
    let mut inv = count_inversions(left) + count_inversions(right);

    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            inv += (left.len() - i) as f64;
            merged.push(right[j]);
            j += 1;
        } else {
            merged.push(left[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    v.copy_from_slice(&merged);
    inv
}

/// Kendall tau between two orderings of the same item set.
///
/// Items must be unique and the sets identical; the result is tau-b over
/// the items' positions (with no ties this equals plain tau).
pub fn kendall_tau<T: Eq + Hash>(ranking_a: &[T], ranking_b: &[T]) -> Result<f64> {
    if ranking_a.len() != ranking_b.len() {
        return Err(Error::Analysis(format!(
            "rankings differ in length: {} vs {}",
            ranking_a.len(),
            ranking_b.len()
        )));
    }
    let mut pos_b: HashMap<&T, usize> = HashMap::with_capacity(ranking_b.len());
    for (i, item) in ranking_b.iter().enumerate() {
        if pos_b.insert(item, i).is_some() {
            return Err(Error::Analysis("duplicate item in ranking".into()));
        }
    }
    let mut seen: HashMap<&T, ()> = HashMap::with_capacity(ranking_a.len());
    let mut x = Vec::with_capacity(ranking_a.len());
    let mut y = Vec::with_capacity(ranking_a.len());
    for (i, item) in ranking_a.iter().enumerate() {
        if seen.insert(item, ()).is_some() {
            return Err(Error::Analysis("duplicate item in ranking".into()));
        }
        let Some(&j) = pos_b.get(item) else {
            return Err(Error::Analysis(
                "rankings cover different item sets".into(),
            ));
        };
        x.push(i as f64);
        y.push(j as f64);
    }
    kendall_tau_b(&x, &y)
}

/// Pearson correlation via the definitional two-pass formula.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Analysis(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(
            "pearson needs at least two pairs".into(),
        ));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::Analysis(
            "pearson undefined: one sample has no variation".into(),
        ));
    }
    Ok(cov / (vx * vy).sqrt())
}

/// How two per-query series are correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    /// Linear correlation of the raw values.
    Pearson,
    /// Rank correlation (tau-b).
    Kendall,
}

impl fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelationMethod::Pearson => write!(f, "pearson"),
            CorrelationMethod::Kendall => write!(f, "kendall"),
        }
    }
}

impl std::str::FromStr for CorrelationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(CorrelationMethod::Pearson),
            "kendall" => Ok(CorrelationMethod::Kendall),
            other => Err(Error::Format(format!("unknown correlation method '{other}'"))),
        }
    }
}

/// Correlates a per-query metric with a per-query online signal over the
/// queries defined in both maps; fewer than three shared queries is an
/// error.
pub fn correlate(
    per_query_metric: &BTreeMap<String, f64>,
    per_query_online: &BTreeMap<String, f64>,
    method: CorrelationMethod,
) -> Result<f64> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (qid, &m) in per_query_metric {
        if let Some(&o) = per_query_online.get(qid) {
            x.push(m);
            y.push(o);
        }
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlation needs at least 3 shared queries, found {}",
            x.len()
        )));
    }
    match method {
        CorrelationMethod::Pearson => pearson(&x, &y),
        CorrelationMethod::Kendall => kendall_tau_b(&x, &y),
    }
}

/// Kendall tau between the per-query scores of two reports, over their
/// shared queries.
pub fn per_query_tau(a: &MetricReport, b: &MetricReport) -> Result<f64> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (qid, &va) in a.per_query() {
        if let Some(&vb) = b.per_query().get(qid) {
            x.push(va);
            y.push(vb);
        }
    }
    kendall_tau_b(&x, &y)
}

/// Raw labels from several raters for one (query, document, aspect) item.
#[derive(Debug, Clone)]
pub struct RaterLabelSet {
    /// Query identifier.
    pub query_id: String,
    /// Document identifier.
    pub doc_id: String,
    /// Which aspect was judged.
    pub aspect: crate::relevance::Aspect,
    /// One label per rater.
    pub labels: Vec<Grade>,
}

impl RaterLabelSet {
    /// Builds an item; at least one label is required.
    pub fn new(
        query_id: impl Into<String>,
        doc_id: impl Into<String>,
        aspect: crate::relevance::Aspect,
        labels: Vec<Grade>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Analysis("rater label set holds no labels".into()));
        }
        Ok(RaterLabelSet {
            query_id: query_id.into(),
            doc_id: doc_id.into(),
            aspect,
            labels,
        })
    }
}

/// How disagreeing raters are collapsed into one label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregationRule {
    /// Modal label; ties broken toward the lower grade.
    MajorityLow,
    /// Arithmetic mean rounded half-down.
    MeanRound,
}

impl fmt::Display for AggregationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregationRule::MajorityLow => write!(f, "majority_low"),
            AggregationRule::MeanRound => write!(f, "mean_round"),
        }
    }
}

impl std::str::FromStr for AggregationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority_low" => Ok(AggregationRule::MajorityLow),
            "mean_round" => Ok(AggregationRule::MeanRound),
            other => Err(Error::Format(format!("unknown aggregation rule '{other}'"))),
        }
    }
}

/// Collapses one item's rater labels into a single grade.
pub fn aggregate_raters(set: &RaterLabelSet, rule: AggregationRule) -> Result<Grade> {
    if set.labels.is_empty() {
        return Err(Error::Analysis("rater label set holds no labels".into()));
    }
    match rule {
        AggregationRule::MajorityLow => {
            let mut counts = [0usize; GRADES];
            for g in &set.labels {
                counts[g.value() as usize] += 1;
            }
            let best = *counts.iter().max().expect("non-empty");
            let grade = counts
                .iter()
                .position(|&c| c == best)
                .expect("some grade has the max count");
            Grade::new(grade as u8)
        }
        AggregationRule::MeanRound => {
            let mean = set.labels.iter().map(|g| f64::from(g.value())).sum::<f64>()
                / set.labels.len() as f64;
            // round half-down: 2.5 collapses to 2
            let rounded = (mean - 0.5).ceil().clamp(0.0, f64::from(MAX_GRADE));
            Grade::new(rounded as u8)
        }
    }
}

/// Inter-rater agreement over a collection of items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementStats {
    /// Mean proportion of agreeing rater pairs per item.
    pub exact_agreement: f64,
    /// Fleiss' kappa over the grade categories.
    pub fleiss_kappa: f64,
    /// Items that entered the statistics (those with at least two raters).
    pub items: usize,
}

/// Computes percent exact agreement and Fleiss' kappa. Items rated by a
/// single rater carry no pairwise information and are skipped.
pub fn agreement(items: &[RaterLabelSet]) -> Result<AgreementStats> {
    let rated: Vec<&RaterLabelSet> = items.iter().filter(|s| s.labels.len() >= 2).collect();
    if rated.is_empty() {
        return Err(Error::InsufficientData(
            "agreement needs at least one item with two or more raters".into(),
        ));
    }
    let mut sum_pi = 0.0;
    let mut category_totals = [0.0; GRADES];
    let mut total_labels = 0.0;
    for set in &rated {
        let m = set.labels.len() as f64;
        let mut counts = [0.0; GRADES];
        for g in &set.labels {
            counts[g.value() as usize] += 1.0;
        }
        let agreeing: f64 = counts.iter().map(|&c| c * (c - 1.0)).sum();
        sum_pi += agreeing / (m * (m - 1.0));
        for (g, &c) in counts.iter().enumerate() {
            category_totals[g] += c;
        }
        total_labels += m;
    }
    let p_bar = sum_pi / rated.len() as f64;
    let p_e: f64 = category_totals
        .iter()
        .map(|&c| (c / total_labels) * (c / total_labels))
        .sum();
    let fleiss_kappa = if (1.0 - p_e).abs() < 1e-12 {
        // a single category carries all labels: agreement is perfect
        1.0
    } else {
        (p_bar - p_e) / (1.0 - p_e)
    };
    Ok(AgreementStats {
        exact_agreement: p_bar,
        fleiss_kappa,
        items: rated.len(),
    })
}
