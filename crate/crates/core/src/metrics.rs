//! The click-model metric family plus DCG and ERR baselines.
//!
//! A click model turns judgments into a metric by weighting per-document
//! gains with the model's click probabilities (document utility) or
//! examination probabilities (utility of the page itself, gathered from
//! the snippets without any click):
//!
//! ```text
//! uMetric   = sum_k P(C_k = 1) * gain(R_k)
//! uMetric_S = sum_k P(E_k = 1) * gain(S_k)
//! ```
//!
//! The closed forms `u_dcm`, `u_dbn`, ... are these sums evaluated over
//! the corresponding model profile; they are defined as exactly that
//! composition, so no separate arithmetic path exists to drift from it.

use std::fmt;

use crate::click_models::{dbn_profile, dcm_profile, ClickModel, ClickModelParams, ExaminationProfile};
use crate::error::{Error, Result};
use crate::relevance::{Aspect, GainScheme, LabeledSerp};

/// The metrics this crate can compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Generic sum over a caller-supplied examination profile.
    UMetricGeneric,
    /// Document utility under DCM.
    UDcm,
    /// Snippet utility under DCM.
    UDcmS,
    /// Document utility under DBN.
    UDbn,
    /// Snippet utility under DBN.
    UDbnS,
    /// Discounted cumulative gain, `sum (2^r - 1) / log2(i + 1)`.
    Dcg,
    /// Expected reciprocal rank.
    Err,
}

impl MetricKind {
    /// True for the metrics that need fitted click model parameters.
    pub fn needs_params(self) -> bool {
        matches!(
            self,
            MetricKind::UDcm | MetricKind::UDcmS | MetricKind::UDbn | MetricKind::UDbnS
        )
    }

    /// The click model a parametric metric runs on.
    pub fn model(self) -> Option<ClickModel> {
        match self {
            MetricKind::UDcm | MetricKind::UDcmS => Some(ClickModel::Dcm),
            MetricKind::UDbn | MetricKind::UDbnS => Some(ClickModel::Dbn),
            _ => None,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MetricKind::UMetricGeneric => "umetric",
            MetricKind::UDcm => "udcm",
            MetricKind::UDcmS => "udcm-s",
            MetricKind::UDbn => "udbn",
            MetricKind::UDbnS => "udbn-s",
            MetricKind::Dcg => "dcg",
            MetricKind::Err => "err",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "umetric" => Ok(MetricKind::UMetricGeneric),
            "udcm" => Ok(MetricKind::UDcm),
            "udcm-s" => Ok(MetricKind::UDcmS),
            "udbn" => Ok(MetricKind::UDbn),
            "udbn-s" => Ok(MetricKind::UDbnS),
            "dcg" => Ok(MetricKind::Dcg),
            "err" => Ok(MetricKind::Err),
            other => Err(Error::Format(format!("unknown metric '{other}'"))),
        }
    }
}

/// What to compute and how: metric kind, gain schemes, evaluation depth,
/// and the optional scalarization weight for combining document and
/// snippet utility into one number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    /// Which metric to compute.
    pub kind: MetricKind,
    /// Gain scheme applied to topical labels.
    pub gain_topical: GainScheme,
    /// Gain scheme applied to snippet labels.
    pub gain_snippet: GainScheme,
    /// Evaluation depth; pages are truncated to this many ranks first.
    pub depth: usize,
    /// Optional weight `w` for `w * doc + (1 - w) * snippet`; off when
    /// unset, and the two utilities are reported separately.
    pub combine_weight: Option<f64>,
}

impl MetricSpec {
    /// A spec with exponential gains, depth 10, and no scalarization.
    pub fn new(kind: MetricKind) -> Self {
        MetricSpec {
            kind,
            gain_topical: GainScheme::exponential(),
            gain_snippet: GainScheme::exponential(),
            depth: 10,
            combine_weight: None,
        }
    }

    /// Replaces the evaluation depth.
    pub fn with_depth(mut self, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("metric depth must be >= 1".into()));
        }
        self.depth = depth;
        Ok(self)
    }

    /// Replaces both gain schemes.
    pub fn with_gains(mut self, topical: GainScheme, snippet: GainScheme) -> Self {
        self.gain_topical = topical;
        self.gain_snippet = snippet;
        self
    }

    /// Enables scalarization with weight `w` in `[0, 1]`.
    pub fn with_combine_weight(mut self, w: f64) -> Result<Self> {
        if !w.is_finite() || !(0.0..=1.0).contains(&w) {
            return Err(Error::Config(format!(
                "combine weight must lie in [0, 1], got {w}"
            )));
        }
        self.combine_weight = Some(w);
        Ok(self)
    }

    /// `w * doc + (1 - w) * snippet` when a weight is set.
    pub fn combine(&self, doc_utility: f64, snippet_utility: f64) -> Option<f64> {
        self.combine_weight
            .map(|w| w * doc_utility + (1.0 - w) * snippet_utility)
    }
}

fn check_lengths(profile: &ExaminationProfile, serp: &LabeledSerp) -> Result<()> {
    if profile.len() != serp.len() {
        return Err(Error::Evaluation(format!(
            "profile covers {} ranks but the page has {}",
            profile.len(),
            serp.len()
        )));
    }
    Ok(())
}

/// Document utility: `sum_k click[k] * gain(topical_k)` over the given
/// profile. The profile and page must cover the same ranks; depth
/// truncation is the caller's job.
pub fn u_metric(profile: &ExaminationProfile, serp: &LabeledSerp, spec: &MetricSpec) -> Result<f64> {
    check_lengths(profile, serp)?;
    let mut total = 0.0;
    for (k, r) in serp.results().iter().enumerate() {
        let grade = r.label(Aspect::Topical).ok_or_else(|| {
            Error::Evaluation(format!(
                "missing topical label for document '{}' at rank {}",
                r.doc_id(),
                k + 1
            ))
        })?;
        total += profile.click()[k] * spec.gain_topical.gain(grade)?;
    }
    Ok(total)
}

/// Snippet utility: `sum_k exam[k] * gain(snippet_k)` over the given
/// profile.
pub fn u_metric_s(
    profile: &ExaminationProfile,
    serp: &LabeledSerp,
    spec: &MetricSpec,
) -> Result<f64> {
    check_lengths(profile, serp)?;
    let mut total = 0.0;
    for (k, r) in serp.results().iter().enumerate() {
        let grade = r.label(Aspect::Snippet).ok_or_else(|| {
            Error::Evaluation(format!(
                "missing snippet label for document '{}' at rank {}",
                r.doc_id(),
                k + 1
            ))
        })?;
        total += profile.exam()[k] * spec.gain_snippet.gain(grade)?;
    }
    Ok(total)
}

/// Document utility under DCM on the page truncated to `spec.depth`.
pub fn u_dcm(serp: &LabeledSerp, params: &ClickModelParams, spec: &MetricSpec) -> Result<f64> {
    let page = serp.truncated(spec.depth)?;
    u_metric(&dcm_profile(&page, params)?, &page, spec)
}

/// Snippet utility under DCM on the page truncated to `spec.depth`.
pub fn u_dcm_s(serp: &LabeledSerp, params: &ClickModelParams, spec: &MetricSpec) -> Result<f64> {
    let page = serp.truncated(spec.depth)?;
    u_metric_s(&dcm_profile(&page, params)?, &page, spec)
}

/// Document utility under DBN on the page truncated to `spec.depth`.
pub fn u_dbn(serp: &LabeledSerp, params: &ClickModelParams, spec: &MetricSpec) -> Result<f64> {
    let page = serp.truncated(spec.depth)?;
    u_metric(&dbn_profile(&page, params)?, &page, spec)
}

/// Snippet utility under DBN on the page truncated to `spec.depth`.
pub fn u_dbn_s(serp: &LabeledSerp, params: &ClickModelParams, spec: &MetricSpec) -> Result<f64> {
    let page = serp.truncated(spec.depth)?;
    u_metric_s(&dbn_profile(&page, params)?, &page, spec)
}

/// `DCG@depth = sum_i (2^{r_i} - 1) / log2(i + 1)` over topical labels.
pub fn dcg(serp: &LabeledSerp, spec: &MetricSpec) -> Result<f64> {
    let page = serp.truncated(spec.depth)?;
    let mut total = 0.0;
    for (i, r) in page.results().iter().enumerate() {
        let grade = r.label(Aspect::Topical).ok_or_else(|| {
            Error::Evaluation(format!(
                "missing topical label for document '{}' at rank {}",
                r.doc_id(),
                i + 1
            ))
        })?;
        let num = ((1u32 << grade.value()) - 1) as f64;
        total += num / (i as f64 + 2.0).log2();
    }
    Ok(total)
}

/// `ERR@depth = sum_k (1/k) * g_k * prod_{i<k} (1 - g_i)` with the
/// exponential gain, following the cited convention regardless of the
/// configured gain kind (the top grade is still taken from the scheme).
pub fn err(serp: &LabeledSerp, spec: &MetricSpec) -> Result<f64> {
    let page = serp.truncated(spec.depth)?;
    let max = spec.gain_topical.max_grade();
    let mut total = 0.0;
    let mut not_stopped = 1.0;
    for (i, r) in page.results().iter().enumerate() {
        let grade = r.label(Aspect::Topical).ok_or_else(|| {
            Error::Evaluation(format!(
                "missing topical label for document '{}' at rank {}",
                r.doc_id(),
                i + 1
            ))
        })?;
        if grade.value() > max {
            return Err(Error::Domain(format!(
                "grade {} exceeds scheme max_grade {max}",
                grade.value()
            )));
        }
        let g = ((1u32 << grade.value()) - 1) as f64 / (1u32 << max) as f64;
        total += g * not_stopped / (i as f64 + 1.0);
        not_stopped *= 1.0 - g;
    }
    Ok(total)
}
