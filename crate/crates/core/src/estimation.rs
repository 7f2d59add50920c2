//! Fits click model parameters from click logs joined with judgments.
//!
//! DCM uses the standard closed-form approximate MLE in which examination
//! is assumed to end at the last clicked rank; sessions without clicks are
//! excluded from the attractiveness counts because their reading depth is
//! unidentifiable under that approximation. DBN is fitted with EM over the
//! latent examination/satisfaction chain. Parameters are shared across all
//! documents carrying the same label, which is what turns a click model
//! into a judgment-driven metric.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::click_models::{session_log_likelihood, ClickModelParams};
use crate::error::{Error, Result};
use crate::relevance::{
    Aspect, Grade, JudgedResult, JudgmentStore, LabeledSerp, MissingPolicy, DEPTH_CAP, MAX_GRADE,
};

const GRADES: usize = MAX_GRADE as usize + 1;

/// One logged impression: a ranked document list and per-rank click flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    session_id: String,
    query_id: String,
    docs: Vec<String>,
    clicks: Vec<bool>,
}

impl Session {
    /// Builds a session; `docs` and `clicks` must have equal length in
    /// `1..=DEPTH_CAP`.
    pub fn new(
        session_id: impl Into<String>,
        query_id: impl Into<String>,
        docs: Vec<String>,
        clicks: Vec<bool>,
    ) -> Result<Self> {
        let session_id = session_id.into();
        if docs.len() != clicks.len() {
            return Err(Error::Format(format!(
                "session '{session_id}': {} docs but {} click flags",
                docs.len(),
                clicks.len()
            )));
        }
        if docs.is_empty() || docs.len() > DEPTH_CAP {
            return Err(Error::Format(format!(
                "session '{session_id}': depth {} outside 1..={DEPTH_CAP}",
                docs.len()
            )));
        }
        Ok(Session {
            session_id,
            query_id: query_id.into(),
            docs,
            clicks,
        })
    }

    /// Opaque session identifier.
    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    /// Query this impression belongs to.
    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    /// Documents in rank order.
    pub fn docs(&self) -> &[String] {
        &self.docs
    }

    /// Click flag per rank.
    pub fn clicks(&self) -> &[bool] {
        &self.clicks
    }

    /// Number of ranks.
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    /// Always false; sessions hold at least one rank.
    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// True when at least one rank was clicked.
    pub fn has_click(&self) -> bool {
        self.clicks.iter().any(|&c| c)
    }

    /// 1-based rank of the last click, if any.
    pub fn last_click_rank(&self) -> Option<usize> {
        self.clicks.iter().rposition(|&c| c).map(|i| i + 1)
    }
}

/// Stopping rule, smoothing, and label policy for parameter fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Maximum number of EM iterations.
    pub max_iters: usize,
    /// Convergence threshold on the absolute change of the mean
    /// per-session log-likelihood.
    pub tol: f64,
    /// Beta pseudo-count added to both outcomes of every Bernoulli
    /// parameter; keeps fitted probabilities off 0 and 1 when positive.
    pub smoothing: f64,
    /// Seed for the EM initialization jitter.
    pub seed: u64,
    /// How documents without the needed label are treated.
    pub missing: MissingPolicy,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iters: 200,
            tol: 1e-6,
            smoothing: 1.0,
            seed: 0,
            missing: MissingPolicy::Zero,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config("tol must be > 0".into()));
        }
        if self.smoothing.is_nan() || self.smoothing < 0.0 {
            return Err(Error::Config("smoothing must be >= 0".into()));
        }
        Ok(())
    }
}

/// Fitted parameters together with the fit trajectory.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    /// The fitted parameters.
    pub params: ClickModelParams,
    /// Number of parameter updates performed.
    pub iterations: usize,
    /// Mean per-session log-likelihood of the data after each update; the
    /// last entry evaluates the returned parameters.
    pub mean_log_likelihoods: Vec<f64>,
    /// The objective EM ascends: mean log-likelihood plus the smoothing
    /// pseudo-count log-prior, per session. Equals `mean_log_likelihoods`
    /// when smoothing is 0, and is non-decreasing for every smoothing.
    pub mean_objectives: Vec<f64>,
}

/// Builds the labeled page a session corresponds to, using the pool's
/// labels where present.
pub fn serp_for_session(session: &Session, judgments: &JudgmentStore) -> Result<LabeledSerp> {
    let mut results = Vec::with_capacity(session.len());
    for (i, doc) in session.docs().iter().enumerate() {
        let labels = judgments
            .get(session.query_id(), doc)
            .copied()
            .unwrap_or_default();
        results.push(JudgedResult::new(
            doc.clone(),
            i + 1,
            labels.topical,
            labels.perceived,
            labels.snippet,
        )?);
    }
    LabeledSerp::new(session.query_id(), results)
}

/// Total log-likelihood of the sessions under `params`; an empty list sums
/// to zero.
pub fn log_likelihood(
    sessions: &[Session],
    judgments: &JudgmentStore,
    params: &ClickModelParams,
    missing: MissingPolicy,
) -> Result<f64> {
    let mut total = 0.0;
    for session in sessions {
        let serp = serp_for_session(session, judgments)?.imputed(missing)?;
        total += session_log_likelihood(session, &serp, params)?;
    }
    Ok(total)
}

/// Session labels resolved to plain grade indices for counting.
struct ResolvedSession {
    perceived: Vec<usize>,
    topical: Vec<usize>,
    clicks: Vec<bool>,
}

fn resolve_sessions(
    sessions: &[Session],
    judgments: &JudgmentStore,
    missing: MissingPolicy,
) -> Result<Vec<ResolvedSession>> {
    let mut out = Vec::with_capacity(sessions.len());
    for session in sessions {
        let serp = serp_for_session(session, judgments)?;
        let mut perceived = Vec::with_capacity(serp.len());
        let mut topical = Vec::with_capacity(serp.len());
        for r in serp.results() {
            perceived.push(r.resolved(Aspect::Perceived, missing)?.value() as usize);
            topical.push(r.resolved(Aspect::Topical, missing)?.value() as usize);
        }
        out.push(ResolvedSession {
            perceived,
            topical,
            clicks: session.clicks().to_vec(),
        });
    }
    Ok(out)
}

fn check_fittable(sessions: &[Session]) -> Result<()> {
    if sessions.is_empty() {
        return Err(Error::Estimation("no sessions to fit on".into()));
    }
    if !sessions.iter().any(Session::has_click) {
        return Err(Error::Estimation("no session has a click".into()));
    }
    Ok(())
}

/// Posterior mean of a Bernoulli parameter under Beta pseudo-counts; falls
/// back to 0.5 when there is no evidence at all.
fn beta_mean(successes: f64, trials: f64, smoothing: f64) -> f64 {
    let den = trials + 2.0 * smoothing;
    if den > 0.0 {
        (successes + smoothing) / den
    } else {
        0.5
    }
}

fn grade_map(values: [f64; GRADES]) -> BTreeMap<Grade, f64> {
    values
        .iter()
        .enumerate()
        .map(|(g, &v)| (Grade::new(g as u8).expect("grade in range"), v))
        .collect()
}

/// Closed-form approximate MLE for DCM.
///
/// Counts clicks and impressions at ranks up to each session's last click:
/// `a(A)` is the smoothed click rate of label-`A` impressions in that
/// window, and `s_i` is the smoothed fraction of clicks at rank `i` that
/// ended up being the session's last click.
pub fn fit_dcm(
    sessions: &[Session],
    judgments: &JudgmentStore,
    config: &FitConfig,
) -> Result<FitOutcome> {
    config.validate()?;
    check_fittable(sessions)?;
    let resolved = resolve_sessions(sessions, judgments, config.missing)?;
    let depth = sessions.iter().map(Session::len).max().unwrap_or(0);

    let mut clicks_on = [0.0; GRADES];
    let mut impressions = [0.0; GRADES];
    let mut last_click_at = vec![0.0; depth];
    let mut clicks_at = vec![0.0; depth];

    for (session, labels) in sessions.iter().zip(&resolved) {
        let Some(last) = session.last_click_rank() else {
            continue;
        };
        for (k, clicked_here) in clicks_at.iter_mut().enumerate().take(last) {
            let g = labels.perceived[k];
            impressions[g] += 1.0;
            if labels.clicks[k] {
                clicks_on[g] += 1.0;
                *clicked_here += 1.0;
            }
        }
        last_click_at[last - 1] += 1.0;
    }

    let sm = config.smoothing;
    let mut attr = [0.0; GRADES];
    for g in 0..GRADES {
        attr[g] = beta_mean(clicks_on[g], impressions[g], sm);
    }
    let stop: Vec<f64> = (0..depth)
        .map(|i| beta_mean(last_click_at[i], clicks_at[i], sm))
        .collect();

    let params = ClickModelParams::dcm(grade_map(attr), stop)?;
    let mean_ll =
        log_likelihood(sessions, judgments, &params, config.missing)? / sessions.len() as f64;
    Ok(FitOutcome {
        params,
        iterations: 1,
        mean_log_likelihoods: vec![mean_ll],
        mean_objectives: vec![mean_ll],
    })
}

/// Per-iteration expected counts gathered by the DBN E-step.
struct EStepStats {
    mean_ll: f64,
    exam_by_perceived: [f64; GRADES],
    sat_posterior_by_topical: [f64; GRADES],
    continue_successes: f64,
    continue_trials: f64,
}

struct DbnState {
    attr: [f64; GRADES],
    sat: [f64; GRADES],
    gamma: f64,
}

impl DbnState {
    /// Log-density of the Beta pseudo-count prior at the current point, up
    /// to an additive constant. Zero when smoothing is off.
    fn log_prior(&self, smoothing: f64) -> f64 {
        if smoothing == 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        for g in 0..GRADES {
            total += self.attr[g].ln() + (1.0 - self.attr[g]).ln();
            total += self.sat[g].ln() + (1.0 - self.sat[g]).ln();
        }
        total += self.gamma.ln() + (1.0 - self.gamma).ln();
        smoothing * total
    }
}

/// Forward/backward pass over the latent examination chain of one session.
///
/// Returns `None` when the observed clicks have zero probability under the
/// current parameters.
fn dbn_e_step_session(
    labels: &ResolvedSession,
    state: &DbnState,
    p_exam: &mut Vec<f64>,
    forward: &mut Vec<f64>,
    backward: &mut Vec<f64>,
    dead_tail: &mut Vec<bool>,
    stats: &mut EStepStats,
) -> Option<f64> {
    let n = labels.clicks.len();
    let gamma = state.gamma;

    forward.clear();
    forward.push(1.0);
    for k in 0..n {
        let alpha = state.attr[labels.perceived[k]];
        let (p_obs, cont) = if labels.clicks[k] {
            (alpha, (1.0 - state.sat[labels.topical[k]]) * gamma)
        } else {
            (1.0 - alpha, gamma)
        };
        let prev = forward[k];
        forward.push(prev * p_obs * cont);
    }

    // dead_tail[k]: no clicks observed at ranks k+1.. (0-based k..n-1 window)
    dead_tail.clear();
    dead_tail.resize(n + 1, true);
    backward.clear();
    backward.resize(n + 1, 1.0);
    for k in (0..n).rev() {
        dead_tail[k] = dead_tail[k + 1] && !labels.clicks[k];
        let alpha = state.attr[labels.perceived[k]];
        let (p_obs, cont) = if labels.clicks[k] {
            (alpha, (1.0 - state.sat[labels.topical[k]]) * gamma)
        } else {
            (1.0 - alpha, gamma)
        };
        let ended = if dead_tail[k + 1] { 1.0 } else { 0.0 };
        backward[k] = p_obs * (cont * backward[k + 1] + (1.0 - cont) * ended);
    }

    let p_clicks = backward[0];
    if !p_clicks.is_finite() || p_clicks <= 0.0 {
        return None;
    }

    p_exam.clear();
    for k in 0..n {
        let post = (forward[k] * backward[k] / p_clicks).clamp(0.0, 1.0);
        p_exam.push(post);
        stats.exam_by_perceived[labels.perceived[k]] += post;
    }

    for k in 0..n {
        let mut p_sat = 0.0;
        if labels.clicks[k] {
            let alpha = state.attr[labels.perceived[k]];
            let sigma = state.sat[labels.topical[k]];
            if dead_tail[k + 1] {
                p_sat = (forward[k] * alpha * sigma / p_clicks).clamp(0.0, 1.0);
            }
            stats.sat_posterior_by_topical[labels.topical[k]] += p_sat;
        }
        if k + 1 < n {
            stats.continue_trials += if labels.clicks[k] {
                1.0 - p_sat
            } else {
                p_exam[k]
            };
            stats.continue_successes += p_exam[k + 1];
        }
    }

    Some(p_clicks.min(1.0).ln())
}

/// EM fit for DBN.
///
/// Starts from attractiveness and satisfaction 0.5 and continuation 0.9,
/// each jittered by at most 0.01 from the seed, and stops once the mean
/// per-session log-likelihood moves by less than `tol` or `max_iters`
/// updates have been applied.
pub fn fit_dbn(
    sessions: &[Session],
    judgments: &JudgmentStore,
    config: &FitConfig,
) -> Result<FitOutcome> {
    config.validate()?;
    check_fittable(sessions)?;
    let resolved = resolve_sessions(sessions, judgments, config.missing)?;
    let n_sessions = sessions.len() as f64;
    let sm = config.smoothing;

    // Observed counts that never change across iterations.
    let mut clicks_by_perceived = [0.0; GRADES];
    let mut clicks_by_topical = [0.0; GRADES];
    for labels in &resolved {
        for k in 0..labels.clicks.len() {
            if labels.clicks[k] {
                clicks_by_perceived[labels.perceived[k]] += 1.0;
                clicks_by_topical[labels.topical[k]] += 1.0;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut jitter = move || -> f64 { (rng.gen::<f64>() - 0.5) * 0.02 };
    let mut state = DbnState {
        attr: [0.0; GRADES],
        sat: [0.0; GRADES],
        gamma: 0.0,
    };
    for g in 0..GRADES {
        state.attr[g] = 0.5 + jitter();
    }
    for g in 0..GRADES {
        state.sat[g] = 0.5 + jitter();
    }
    state.gamma = 0.9 + jitter();

    let mut trace = Vec::new();
    let mut objectives = Vec::new();
    let mut updates = 0;
    let mut p_exam = Vec::new();
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let mut dead_tail = Vec::new();

    loop {
        let mut stats = EStepStats {
            mean_ll: 0.0,
            exam_by_perceived: [0.0; GRADES],
            sat_posterior_by_topical: [0.0; GRADES],
            continue_successes: 0.0,
            continue_trials: 0.0,
        };
        let mut sum_ll = 0.0;
        for (idx, labels) in resolved.iter().enumerate() {
            match dbn_e_step_session(
                labels,
                &state,
                &mut p_exam,
                &mut forward,
                &mut backward,
                &mut dead_tail,
                &mut stats,
            ) {
                Some(ll) => sum_ll += ll,
                None => {
                    return Err(Error::Estimation(format!(
                        "session '{}' has zero probability under the current parameters",
                        sessions[idx].session_id()
                    )))
                }
            }
        }
        stats.mean_ll = sum_ll / n_sessions;
        trace.push(stats.mean_ll);
        objectives.push(stats.mean_ll + state.log_prior(sm) / n_sessions);

        let converged = trace.len() >= 2
            && (trace[trace.len() - 1] - trace[trace.len() - 2]).abs() < config.tol;
        if converged || updates >= config.max_iters {
            break;
        }

        for g in 0..GRADES {
            if stats.exam_by_perceived[g] + 2.0 * sm > 0.0 {
                state.attr[g] = beta_mean(clicks_by_perceived[g], stats.exam_by_perceived[g], sm);
            }
            if clicks_by_topical[g] + 2.0 * sm > 0.0 {
                state.sat[g] = beta_mean(
                    stats.sat_posterior_by_topical[g],
                    clicks_by_topical[g],
                    sm,
                );
            }
        }
        if stats.continue_trials + 2.0 * sm > 0.0 {
            state.gamma = beta_mean(stats.continue_successes, stats.continue_trials, sm);
        }
        updates += 1;
    }

    let params = ClickModelParams::dbn(grade_map(state.attr), grade_map(state.sat), state.gamma)?;
    Ok(FitOutcome {
        params,
        iterations: updates,
        mean_log_likelihoods: trace,
        mean_objectives: objectives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relevance::LabelTriple;
    use approx::assert_abs_diff_eq;

    fn g(v: u8) -> Grade {
        Grade::new(v).unwrap()
    }

    fn single_doc_judgments() -> JudgmentStore {
        let mut store = JudgmentStore::new();
        store.insert(
            "q1",
            "d1",
            LabelTriple {
                topical: Some(g(3)),
                perceived: Some(g(2)),
                snippet: None,
            },
        );
        store
    }

    fn session(id: &str, docs: &[&str], clicks: &[bool]) -> Session {
        Session::new(
            id,
            "q1",
            docs.iter().map(|d| d.to_string()).collect(),
            clicks.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn session_validation() {
        assert!(Session::new("s", "q", vec!["d".into()], vec![true, false]).is_err());
        assert!(Session::new("s", "q", vec![], vec![]).is_err());
        let s = session("s", &["a", "b", "c"], &[false, true, false]);
        assert_eq!(s.last_click_rank(), Some(2));
        assert!(s.has_click());
    }

    #[test]
    fn fit_rejects_empty_and_clickless_input() {
        let store = single_doc_judgments();
        let cfg = FitConfig::default();
        assert!(matches!(
            fit_dcm(&[], &store, &cfg),
            Err(Error::Estimation(_))
        ));
        let clickless = vec![session("s1", &["d1"], &[false])];
        assert!(matches!(
            fit_dcm(&clickless, &store, &cfg),
            Err(Error::Estimation(_))
        ));
        assert!(matches!(
            fit_dbn(&clickless, &store, &cfg),
            Err(Error::Estimation(_))
        ));
    }

    #[test]
    fn dcm_counts_single_session_unsmoothed() {
        let store = single_doc_judgments();
        let sessions = vec![session("s1", &["d1", "d2", "d3"], &[true, false, false])];
        let cfg = FitConfig {
            smoothing: 0.0,
            ..FitConfig::default()
        };
        let fit = fit_dcm(&sessions, &store, &cfg).unwrap();
        // d1 carries perceived grade 2; ranks beyond the last click are excluded
        assert_eq!(fit.params.attractiveness()[&g(2)], 1.0);
        assert_eq!(fit.params.dcm_stop()[0], 1.0);
        // unseen grades and ranks fall back to the uninformed value
        assert_eq!(fit.params.attractiveness()[&g(0)], 0.5);
        assert_eq!(fit.params.dcm_stop()[1], 0.5);
    }

    #[test]
    fn dcm_smoothing_keeps_parameters_interior() {
        let store = single_doc_judgments();
        let sessions = vec![session("s1", &["d1"], &[true])];
        let fit = fit_dcm(&sessions, &store, &FitConfig::default()).unwrap();
        for &v in fit.params.attractiveness().values() {
            assert!(v > 0.0 && v < 1.0);
        }
        assert!(fit.params.dcm_stop().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn log_likelihood_empty_is_zero() {
        let store = single_doc_judgments();
        let params = ClickModelParams::dcm(
            (0..=4).map(|v| (g(v), 0.5)).collect(),
            vec![0.5; 10],
        )
        .unwrap();
        let ll = log_likelihood(&[], &store, &params, MissingPolicy::Zero).unwrap();
        assert_eq!(ll, 0.0);
    }

    #[test]
    fn log_likelihood_single_click() {
        let store = single_doc_judgments();
        let mut attr: BTreeMap<Grade, f64> = (0..=4).map(|v| (g(v), 0.5)).collect();
        attr.insert(g(2), 0.8);
        let params = ClickModelParams::dcm(attr, vec![0.5]).unwrap();
        let sessions = vec![session("s1", &["d1"], &[true])];
        let ll = log_likelihood(&sessions, &store, &params, MissingPolicy::Zero).unwrap();
        assert_abs_diff_eq!(ll, 0.8f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn log_likelihood_is_additive() {
        let store = single_doc_judgments();
        let params = ClickModelParams::dcm(
            (0..=4).map(|v| (g(v), 0.3 + 0.1 * f64::from(v))).collect(),
            vec![0.4; 3],
        )
        .unwrap();
        let sessions = vec![
            session("s1", &["d1", "d2"], &[true, false]),
            session("s2", &["d2", "d1", "d3"], &[false, true, true]),
        ];
        let total = log_likelihood(&sessions, &store, &params, MissingPolicy::Zero).unwrap();
        let each: f64 = sessions
            .iter()
            .map(|s| {
                log_likelihood(
                    std::slice::from_ref(s),
                    &store,
                    &params,
                    MissingPolicy::Zero,
                )
                .unwrap()
            })
            .sum();
        assert_abs_diff_eq!(total, each, epsilon = 1e-12);
    }

    #[test]
    fn strict_policy_rejects_unjudged_documents() {
        let store = single_doc_judgments();
        let sessions = vec![session("s1", &["dx"], &[true])];
        let cfg = FitConfig {
            missing: MissingPolicy::Strict,
            ..FitConfig::default()
        };
        assert!(fit_dcm(&sessions, &store, &cfg).is_err());
    }

    #[test]
    fn dbn_fit_is_deterministic_given_seed() {
        let store = single_doc_judgments();
        let sessions = vec![
            session("s1", &["d1", "d2"], &[true, false]),
            session("s2", &["d1", "d2"], &[false, true]),
            session("s3", &["d2", "d1"], &[true, true]),
        ];
        let cfg = FitConfig {
            max_iters: 25,
            seed: 7,
            ..FitConfig::default()
        };
        let a = fit_dbn(&sessions, &store, &cfg).unwrap();
        let b = fit_dbn(&sessions, &store, &cfg).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.mean_log_likelihoods, b.mean_log_likelihoods);
    }

    #[test]
    fn dbn_em_objective_is_non_decreasing() {
        let store = single_doc_judgments();
        let sessions = vec![
            session("s1", &["d1", "d2", "d3"], &[true, false, true]),
            session("s2", &["d1", "d2", "d3"], &[false, false, true]),
            session("s3", &["d3", "d1", "d2"], &[true, false, false]),
            session("s4", &["d2", "d3", "d1"], &[false, true, false]),
        ];
        for smoothing in [0.0, 0.5, 1.0] {
            let cfg = FitConfig {
                max_iters: 50,
                smoothing,
                ..FitConfig::default()
            };
            let fit = fit_dbn(&sessions, &store, &cfg).unwrap();
            for w in fit.mean_objectives.windows(2) {
                assert!(
                    w[1] >= w[0] - 1e-9,
                    "EM objective decreased: {} -> {} (smoothing {smoothing})",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn dbn_em_unsmoothed_likelihood_is_non_decreasing() {
        // without pseudo-counts the EM objective is the likelihood itself
        let store = single_doc_judgments();
        let sessions = vec![
            session("s1", &["d1", "d2", "d3"], &[true, false, true]),
            session("s2", &["d1", "d2", "d3"], &[false, false, true]),
            session("s3", &["d3", "d1", "d2"], &[true, false, false]),
            session("s4", &["d2", "d3", "d1"], &[false, true, false]),
            session("s5", &["d1", "d3", "d2"], &[false, true, true]),
        ];
        let cfg = FitConfig {
            max_iters: 80,
            smoothing: 0.0,
            ..FitConfig::default()
        };
        let fit = fit_dbn(&sessions, &store, &cfg).unwrap();
        assert_eq!(fit.mean_log_likelihoods, fit.mean_objectives);
        for w in fit.mean_log_likelihoods.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "decreased: {} -> {}", w[0], w[1]);
        }
    }
}
