//! serpeval is an offline search-quality evaluation toolkit built around
//! three aspects of relevance: *topical* (does the document answer the
//! query), *perceived* (does the snippet look worth clicking), and
//! *snippet* (does the snippet itself answer the query). Judgments on all
//! three feed click models — DCM and DBN — whose click and examination
//! probabilities weight per-document gains into page-level quality
//! metrics, next to plain DCG and ERR baselines.
//!
//! The pieces fit together as a pipeline:
//!
//! 1. [`formats`] parses runs, judgment pools, click logs, and parameter
//!    files.
//! 2. [`run::join`] turns a run plus judgments into labeled result pages.
//! 3. [`estimation`] fits [`click_models::ClickModelParams`] from click
//!    logs, or [`simulate`] generates logs from known parameters.
//! 4. [`metrics`] computes document utility (click-probability weighted)
//!    and snippet utility (examination-probability weighted) per page.
//! 5. [`analysis`] aggregates per query, compares systems, correlates
//!    offline metrics with online click metrics, and reconciles
//!    multi-rater labels.
//!
//! # Example
//!
//! ```
//! use std::collections::BTreeMap;
//! use serpeval::relevance::{Grade, JudgedResult, LabeledSerp, GainScheme};
//! use serpeval::click_models::ClickModelParams;
//! use serpeval::metrics::{u_dcm, MetricKind, MetricSpec};
//!
//! # fn main() -> serpeval::error::Result<()> {
//! let page = LabeledSerp::new(
//!     "q1",
//!     vec![
//!         JudgedResult::new("d1", 1, Some(Grade::new(4)?), Some(Grade::new(4)?), None)?,
//!         JudgedResult::new("d2", 2, Some(Grade::new(2)?), Some(Grade::new(2)?), None)?,
//!     ],
//! )?;
//!
//! let mut attractiveness = BTreeMap::new();
//! attractiveness.insert(Grade::new(4)?, 0.8);
//! attractiveness.insert(Grade::new(2)?, 0.4);
//! let params = ClickModelParams::dcm(attractiveness, vec![0.5, 0.5])?;
//!
//! let spec = MetricSpec::new(MetricKind::UDcm)
//!     .with_gains(GainScheme::linear(), GainScheme::linear());
//! let utility = u_dcm(&page, &params, &spec)?;
//! assert!((utility - 0.92).abs() < 1e-12);
//! # Ok(())
//! # }
//! ```

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod analysis;
pub mod click_models;
pub mod error;
pub mod estimation;
pub mod formats;
pub mod metrics;
pub mod relevance;
pub mod run;
pub mod simulate;

pub use analysis::{MetricReport, OnlineMetrics};
pub use click_models::{ClickModel, ClickModelParams, ExaminationProfile};
pub use error::{Error, Result};
pub use estimation::{FitConfig, FitOutcome, Session};
pub use metrics::{MetricKind, MetricSpec};
pub use relevance::{GainScheme, Grade, JudgedResult, JudgmentStore, LabeledSerp, MissingPolicy};
pub use run::RankedRun;
pub use simulate::SimConfig;
