//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A grade or gain argument lies outside its valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A file, record, or in-memory structure violates its format contract.
    #[error("format error: {0}")]
    Format(String),

    /// Inputs to a metric or profile computation are inconsistent.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// Parameter fitting cannot proceed on the given sessions.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// An input exceeds a hard size limit.
    #[error("size error: {0}")]
    Size(String),

    /// Parameters or options are inconsistent with the requested operation.
    #[error("configuration error: {0}")]
    Config(String),

    /// Analysis inputs are inconsistent with each other.
    #[error("analysis error: {0}")]
    Analysis(String),

    /// Too few data points to compute the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Format error pinned to a 1-based line of an input file.
    pub fn format_at(line: usize, msg: impl std::fmt::Display) -> Self {
        Error::Format(format!("line {line}: {msg}"))
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
