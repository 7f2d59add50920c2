//! Synthetic click logs drawn from a fitted or hand-set click model.
//!
//! Simulation is the oracle for parameter estimation (simulate, then fit,
//! then compare against the generating truth) and the engine for
//! correlation experiments against online click metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::click_models::{ClickModel, ClickModelParams};
use crate::error::{Error, Result};
use crate::estimation::Session;
use crate::relevance::{Aspect, LabeledSerp};

/// How many sessions to draw and from which model.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Sessions generated per labeled page.
    pub sessions_per_query: usize,
    /// Master seed; each session draws from its own stream derived from
    /// the seed and the session index, so generation order never matters.
    pub seed: u64,
    /// Generating model parameters.
    pub params: ClickModelParams,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.sessions_per_query == 0 {
            return Err(Error::Config("sessions_per_query must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draws sessions from the generative process of the configured model:
/// top-down examination, label-conditioned clicks, model-specific
/// stopping. Labels must be present on every page; apply an imputation
/// policy upstream.
pub fn simulate_sessions(serps: &[LabeledSerp], config: &SimConfig) -> Result<Vec<Session>> {
    config.validate()?;
    let params = &config.params;

    // resolve per-page probabilities once, before drawing anything
    let mut pages = Vec::with_capacity(serps.len());
    for serp in serps {
        let mut attr = Vec::with_capacity(serp.len());
        let mut stop = Vec::with_capacity(serp.len());
        for (k, r) in serp.results().iter().enumerate() {
            let perceived = r.label(Aspect::Perceived).ok_or_else(|| {
                Error::Evaluation(format!(
                    "missing perceived label for document '{}' at rank {} of query '{}'",
                    r.doc_id(),
                    k + 1,
                    serp.query_id()
                ))
            })?;
            attr.push(params.attractiveness_of(perceived)?);
            match params.model() {
                ClickModel::Dcm => {
                    if k >= params.dcm_stop().len() {
                        return Err(Error::Config(format!(
                            "page depth {} of query '{}' exceeds the {}-entry stop-parameter list",
                            serp.len(),
                            serp.query_id(),
                            params.dcm_stop().len()
                        )));
                    }
                    stop.push(params.dcm_stop()[k]);
                }
                ClickModel::Dbn => {
                    let topical = r.label(Aspect::Topical).ok_or_else(|| {
                        Error::Evaluation(format!(
                            "missing topical label for document '{}' at rank {} of query '{}'",
                            r.doc_id(),
                            k + 1,
                            serp.query_id()
                        ))
                    })?;
                    stop.push(params.satisfaction_of(topical)?);
                }
            }
        }
        pages.push((serp, attr, stop));
    }

    let gamma = params.dbn_continuation();
    let mut sessions = Vec::with_capacity(pages.len() * config.sessions_per_query);
    for (page_idx, (serp, attr, stop)) in pages.iter().enumerate() {
        for j in 0..config.sessions_per_query {
            let stream = (page_idx * config.sessions_per_query + j) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(stream);

            let n = serp.len();
            let mut clicks = vec![false; n];
            for k in 0..n {
                // the user examines rank k+1
                if rng.gen::<f64>() < attr[k] {
                    clicks[k] = true;
                    if k + 1 == n {
                        break;
                    }
                    match params.model() {
                        ClickModel::Dcm => {
                            if rng.gen::<f64>() < stop[k] {
                                break;
                            }
                        }
                        ClickModel::Dbn => {
                            if rng.gen::<f64>() < stop[k] {
                                break; // satisfied
                            }
                            if rng.gen::<f64>() >= gamma {
                                break; // abandoned
                            }
                        }
                    }
                } else {
                    if k + 1 == n {
                        break;
                    }
                    if params.model() == ClickModel::Dbn && rng.gen::<f64>() >= gamma {
                        break;
                    }
                }
            }

            sessions.push(Session::new(
                format!("{}:{}", serp.query_id(), j),
                serp.query_id(),
                serp.results().iter().map(|r| r.doc_id().to_string()).collect(),
                clicks,
            )?);
        }
    }
    Ok(sessions)
}
