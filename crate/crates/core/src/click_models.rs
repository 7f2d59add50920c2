//! Closed-form examination and click probabilities for the DCM and DBN
//! click models, plus an exhaustive trace oracle for small result pages.
//!
//! Both models walk the page top-down. Under DCM a user who clicks at rank
//! `i` stops with a position-keyed probability `s_i` and otherwise keeps
//! reading; a skipped result is always followed by the next one. Under DBN
//! a click satisfies the user with a probability keyed by the document's
//! topical label, and an unsatisfied user keeps reading with continuation
//! probability `gamma` after every result, clicked or not. Attractiveness
//! is keyed by the perceived label in both models: a result can only be
//! clicked when it looks clickable.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::estimation::Session;
use crate::relevance::{Aspect, Grade, LabeledSerp};

/// Largest page depth [`enumerate_traces`] accepts.
pub const MAX_TRACE_DEPTH: usize = 12;

/// Which click model a parameter set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClickModel {
    /// Dependent click model: position-keyed stop after a click.
    Dcm,
    /// Dynamic Bayesian network model: satisfaction-keyed stop plus a
    /// global continuation probability.
    Dbn,
}

impl fmt::Display for ClickModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClickModel::Dcm => write!(f, "dcm"),
            ClickModel::Dbn => write!(f, "dbn"),
        }
    }
}

impl std::str::FromStr for ClickModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dcm" => Ok(ClickModel::Dcm),
            "dbn" => Ok(ClickModel::Dbn),
            other => Err(Error::Format(format!("unknown model '{other}'"))),
        }
    }
}

/// Label-conditioned click model parameters.
///
/// Attractiveness `a(A)` is keyed by the perceived label. DCM stop
/// probabilities `s_i` are keyed by rank (index 0 holds rank 1); the
/// original DCM formulation uses continuation parameters `lambda_i`, which
/// relate to ours as `s_i = 1 - lambda_i`. DBN satisfaction is keyed by
/// the topical label; the continuation probability `gamma` is global.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickModelParams {
    model: ClickModel,
    attractiveness: BTreeMap<Grade, f64>,
    dcm_stop: Vec<f64>,
    dbn_satisfaction: BTreeMap<Grade, f64>,
    dbn_continuation: f64,
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

impl ClickModelParams {
    /// DCM parameters: attractiveness per perceived grade and one stop
    /// probability per rank.
    pub fn dcm(attractiveness: BTreeMap<Grade, f64>, dcm_stop: Vec<f64>) -> Result<Self> {
        for (g, &p) in &attractiveness {
            check_prob(&format!("attractiveness({g})"), p)?;
        }
        for (i, &p) in dcm_stop.iter().enumerate() {
            check_prob(&format!("stop probability at rank {}", i + 1), p)?;
        }
        Ok(ClickModelParams {
            model: ClickModel::Dcm,
            attractiveness,
            dcm_stop,
            dbn_satisfaction: BTreeMap::new(),
            dbn_continuation: 0.0,
        })
    }

    /// DBN parameters: attractiveness per perceived grade, satisfaction per
    /// topical grade, and the continuation probability `gamma`.
    pub fn dbn(
        attractiveness: BTreeMap<Grade, f64>,
        satisfaction: BTreeMap<Grade, f64>,
        continuation: f64,
    ) -> Result<Self> {
        for (g, &p) in &attractiveness {
            check_prob(&format!("attractiveness({g})"), p)?;
        }
        for (g, &p) in &satisfaction {
            check_prob(&format!("satisfaction({g})"), p)?;
        }
        check_prob("continuation", continuation)?;
        Ok(ClickModelParams {
            model: ClickModel::Dbn,
            attractiveness,
            dcm_stop: Vec::new(),
            dbn_satisfaction: satisfaction,
            dbn_continuation: continuation,
        })
    }

    /// The model these parameters belong to.
    pub fn model(&self) -> ClickModel {
        self.model
    }

    /// Attractiveness map keyed by perceived grade.
    pub fn attractiveness(&self) -> &BTreeMap<Grade, f64> {
        &self.attractiveness
    }

    /// DCM stop probabilities keyed by rank (index 0 holds rank 1).
    pub fn dcm_stop(&self) -> &[f64] {
        &self.dcm_stop
    }

    /// DBN satisfaction map keyed by topical grade.
    pub fn dbn_satisfaction(&self) -> &BTreeMap<Grade, f64> {
        &self.dbn_satisfaction
    }

    /// DBN continuation probability `gamma`.
    pub fn dbn_continuation(&self) -> f64 {
        self.dbn_continuation
    }

    /// Attractiveness of a perceived grade; absent grades are an error.
    pub fn attractiveness_of(&self, grade: Grade) -> Result<f64> {
        self.attractiveness.get(&grade).copied().ok_or_else(|| {
            Error::Config(format!("no attractiveness parameter for grade {grade}"))
        })
    }

    /// Satisfaction of a topical grade; absent grades are an error.
    pub fn satisfaction_of(&self, grade: Grade) -> Result<f64> {
        self.dbn_satisfaction.get(&grade).copied().ok_or_else(|| {
            Error::Config(format!("no satisfaction parameter for grade {grade}"))
        })
    }

    fn require_model(&self, expected: ClickModel) -> Result<()> {
        if self.model != expected {
            return Err(Error::Config(format!(
                "expected {expected} parameters, got {}",
                self.model
            )));
        }
        Ok(())
    }
}

/// Per-rank examination and click probabilities for one result page.
#[derive(Debug, Clone, PartialEq)]
pub struct ExaminationProfile {
    exam: Vec<f64>,
    click: Vec<f64>,
}

impl ExaminationProfile {
    /// `exam[k] = P(E_{k+1} = 1)`, the probability rank `k+1` is examined.
    pub fn exam(&self) -> &[f64] {
        &self.exam
    }

    /// `click[k] = P(C_{k+1} = 1)`, the probability rank `k+1` is clicked.
    pub fn click(&self) -> &[f64] {
        &self.click
    }

    /// Page depth the profile covers.
    pub fn len(&self) -> usize {
        self.exam.len()
    }

    /// True when the profile covers no ranks.
    pub fn is_empty(&self) -> bool {
        self.exam.is_empty()
    }
}

/// Per-rank behaviour: click probability plus the probability of moving on
/// to the next rank after a click and after a skip.
struct RankStep {
    click: f64,
    cont_after_click: f64,
    cont_after_skip: f64,
}

fn require_label(serp: &LabeledSerp, idx: usize, aspect: Aspect) -> Result<Grade> {
    serp.results()[idx].label(aspect).ok_or_else(|| {
        Error::Evaluation(format!(
            "missing {aspect} label for document '{}' at rank {} of query '{}'",
            serp.results()[idx].doc_id(),
            idx + 1,
            serp.query_id()
        ))
    })
}

fn rank_steps(serp: &LabeledSerp, params: &ClickModelParams) -> Result<Vec<RankStep>> {
    let n = serp.len();
    let mut steps = Vec::with_capacity(n);
    match params.model {
        ClickModel::Dcm => {
            if n > params.dcm_stop.len() {
                return Err(Error::Evaluation(format!(
                    "page depth {n} exceeds the {}-entry stop-parameter list",
                    params.dcm_stop.len()
                )));
            }
            for k in 0..n {
                let a = params.attractiveness_of(require_label(serp, k, Aspect::Perceived)?)?;
                let s = params.dcm_stop[k];
                steps.push(RankStep {
                    click: a,
                    cont_after_click: 1.0 - s,
                    cont_after_skip: 1.0,
                });
            }
        }
        ClickModel::Dbn => {
            let gamma = params.dbn_continuation;
            for k in 0..n {
                let a = params.attractiveness_of(require_label(serp, k, Aspect::Perceived)?)?;
                let sat = params.satisfaction_of(require_label(serp, k, Aspect::Topical)?)?;
                steps.push(RankStep {
                    click: a,
                    cont_after_click: (1.0 - sat) * gamma,
                    cont_after_skip: gamma,
                });
            }
        }
    }
    Ok(steps)
}

fn profile_from_steps(steps: &[RankStep]) -> ExaminationProfile {
    let n = steps.len();
    let mut exam = Vec::with_capacity(n);
    let mut click = Vec::with_capacity(n);
    let mut reach = 1.0;
    for (k, step) in steps.iter().enumerate() {
        exam.push(reach);
        click.push(step.click * reach);
        if k + 1 < n {
            reach *= (1.0 - step.click) * step.cont_after_skip
                + step.click * step.cont_after_click;
        }
    }
    ExaminationProfile { exam, click }
}

/// DCM closed form: `exam[k] = prod_{i<k} (1 - a(A_i) * s_i)` and
/// `click[k] = a(A_k) * exam[k]`.
///
/// Requires perceived labels on every result; apply an imputation policy
/// upstream when the pool is incomplete.
pub fn dcm_profile(serp: &LabeledSerp, params: &ClickModelParams) -> Result<ExaminationProfile> {
    params.require_model(ClickModel::Dcm)?;
    Ok(profile_from_steps(&rank_steps(serp, params)?))
}

/// DBN closed form: `exam[k+1] = exam[k] * gamma * (1 - a(A_k) * sat(R_k))`
/// and `click[k] = a(A_k) * exam[k]`.
///
/// Requires perceived and topical labels on every result.
pub fn dbn_profile(serp: &LabeledSerp, params: &ClickModelParams) -> Result<ExaminationProfile> {
    params.require_model(ClickModel::Dbn)?;
    Ok(profile_from_steps(&rank_steps(serp, params)?))
}

/// Examination and click probabilities under whichever model `params`
/// carries.
pub fn profile(serp: &LabeledSerp, params: &ClickModelParams) -> Result<ExaminationProfile> {
    match params.model {
        ClickModel::Dcm => dcm_profile(serp, params),
        ClickModel::Dbn => dbn_profile(serp, params),
    }
}

/// Exact distribution over click vectors for one result page, together
/// with the examination marginals accumulated over all behaviour traces.
#[derive(Debug, Clone)]
pub struct TraceDistribution {
    probs: BTreeMap<Vec<bool>, f64>,
    exam: Vec<f64>,
}

impl TraceDistribution {
    /// Probability of every click vector with non-zero support potential.
    pub fn probabilities(&self) -> &BTreeMap<Vec<bool>, f64> {
        &self.probs
    }

    /// Sum of all trace probabilities; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Probability mass of one observed click vector.
    pub fn mass_of(&self, clicks: &[bool]) -> f64 {
        self.probs.get(clicks).copied().unwrap_or(0.0)
    }

    /// `P(C_k = 1)` per rank, summed from the distribution.
    pub fn click_marginals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.exam.len()];
        for (clicks, p) in &self.probs {
            for (k, &c) in clicks.iter().enumerate() {
                if c {
                    out[k] += p;
                }
            }
        }
        out
    }

    /// `P(E_k = 1)` per rank, summed over traces during enumeration.
    pub fn examination_marginals(&self) -> &[f64] {
        &self.exam
    }
}

/// Brute-force oracle: enumerates every user-behaviour trace of the chosen
/// model and aggregates exact click-vector probabilities.
///
/// Written directly from the generative story, branch by branch, so it
/// stays independent of the closed-form recursions it is used to check.
/// Only pages with at most [`MAX_TRACE_DEPTH`] results are accepted.
pub fn enumerate_traces(serp: &LabeledSerp, params: &ClickModelParams) -> Result<TraceDistribution> {
    let n = serp.len();
    if n > MAX_TRACE_DEPTH {
        return Err(Error::Size(format!(
            "trace enumeration supports at most {MAX_TRACE_DEPTH} results, page has {n}"
        )));
    }

    let mut attr = Vec::with_capacity(n);
    for k in 0..n {
        attr.push(params.attractiveness_of(require_label(serp, k, Aspect::Perceived)?)?);
    }

    let mut dist = TraceDistribution {
        probs: BTreeMap::new(),
        exam: vec![0.0; n],
    };
    let mut clicks = vec![false; n];

    match params.model {
        ClickModel::Dcm => {
            if n > params.dcm_stop.len() {
                return Err(Error::Evaluation(format!(
                    "page depth {n} exceeds the {}-entry stop-parameter list",
                    params.dcm_stop.len()
                )));
            }
            let stop = params.dcm_stop.clone();
            walk_dcm(0, 1.0, &attr, &stop, &mut clicks, &mut dist);
        }
        ClickModel::Dbn => {
            let mut sat = Vec::with_capacity(n);
            for k in 0..n {
                sat.push(params.satisfaction_of(require_label(serp, k, Aspect::Topical)?)?);
            }
            let gamma = params.dbn_continuation;
            walk_dbn(0, 1.0, &attr, &sat, gamma, &mut clicks, &mut dist);
        }
    }
    Ok(dist)
}

fn record_leaf(dist: &mut TraceDistribution, clicks: &[bool], p: f64) {
    *dist.probs.entry(clicks.to_vec()).or_insert(0.0) += p;
}

fn walk_dcm(
    k: usize,
    p: f64,
    attr: &[f64],
    stop: &[f64],
    clicks: &mut Vec<bool>,
    dist: &mut TraceDistribution,
) {
    let n = attr.len();
    dist.exam[k] += p;
    let a = attr[k];
    let last = k + 1 == n;

    // click branch
    clicks[k] = true;
    if last {
        record_leaf(dist, clicks, p * a);
    } else {
        // stop after the click, or keep reading
        record_leaf(dist, clicks, p * a * stop[k]);
        walk_dcm(k + 1, p * a * (1.0 - stop[k]), attr, stop, clicks, dist);
    }

    // skip branch: a DCM user always moves on after a skip
    clicks[k] = false;
    if last {
        record_leaf(dist, clicks, p * (1.0 - a));
    } else {
        walk_dcm(k + 1, p * (1.0 - a), attr, stop, clicks, dist);
    }
    // clicks[k] already reset for the caller
}

#[allow(clippy::too_many_arguments)]
fn walk_dbn(
    k: usize,
    p: f64,
    attr: &[f64],
    sat: &[f64],
    gamma: f64,
    clicks: &mut Vec<bool>,
    dist: &mut TraceDistribution,
) {
    let n = attr.len();
    dist.exam[k] += p;
    let a = attr[k];
    let last = k + 1 == n;

    // click branch
    clicks[k] = true;
    if last {
        record_leaf(dist, clicks, p * a);
    } else {
        // satisfied: reading ends here
        record_leaf(dist, clicks, p * a * sat[k]);
        // unsatisfied: abandon or continue
        let unsat = p * a * (1.0 - sat[k]);
        record_leaf(dist, clicks, unsat * (1.0 - gamma));
        walk_dbn(k + 1, unsat * gamma, attr, sat, gamma, clicks, dist);
    }

    // skip branch: abandon or continue
    clicks[k] = false;
    if last {
        record_leaf(dist, clicks, p * (1.0 - a));
    } else {
        let skip = p * (1.0 - a);
        record_leaf(dist, clicks, skip * (1.0 - gamma));
        walk_dbn(k + 1, skip * gamma, attr, sat, gamma, clicks, dist);
    }
}

/// Log-probability of a session's observed click vector under `params`,
/// with latent examination and satisfaction summed out.
///
/// Labels are taken from `serp` by rank; the session's click vector must
/// have the same length as the page.
pub fn session_log_likelihood(
    session: &Session,
    serp: &LabeledSerp,
    params: &ClickModelParams,
) -> Result<f64> {
    let clicks = session.clicks();
    if clicks.len() != serp.len() {
        return Err(Error::Format(format!(
            "session '{}' has {} clicks but the page has {} results",
            session.session_id(),
            clicks.len(),
            serp.len()
        )));
    }
    let steps = rank_steps(serp, params)?;
    Ok(forward_likelihood(&steps, clicks).min(1.0).ln())
}

/// Forward sum over latent reading depths consistent with the clicks.
fn forward_likelihood(steps: &[RankStep], clicks: &[bool]) -> f64 {
    let n = steps.len();
    // any_click_after[k]: a click is observed strictly below rank k+1
    let mut any_click_after = vec![false; n];
    for k in (0..n.saturating_sub(1)).rev() {
        any_click_after[k] = any_click_after[k + 1] || clicks[k + 1];
    }

    let mut alive = 1.0; // P(observed prefix, still reading at rank k+1)
    let mut total = 0.0;
    for k in 0..n {
        let step = &steps[k];
        let p_obs = if clicks[k] { step.click } else { 1.0 - step.click };
        let cont = if clicks[k] {
            step.cont_after_click
        } else {
            step.cont_after_skip
        };
        if k + 1 == n {
            // the page ends; stop-versus-continue is unobservable here
            total += alive * p_obs;
        } else {
            if !any_click_after[k] {
                total += alive * p_obs * (1.0 - cont);
            }
            alive *= p_obs * cont;
        }
    }
    total
}
