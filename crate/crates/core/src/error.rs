//! Error type shared by every module of the crate.

use thiserror::Error;

/// A single rejected row in an input file, numbered from 1 for the first
/// data row after the header.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {}: {}", self.row, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A curve or contract could not be built from its inputs.
    #[error("invalid construction: {0}")]
    Construction(String),

    /// The hazard solver found no sign change in its bracket.
    #[error("calibration failed at tenor {tenor}y: {reason}")]
    Calibration { tenor: f64, reason: String },

    /// Quotes cannot be matched by any non-negative hazard.
    #[error("inconsistent quotes at tenor {tenor}y: {reason}")]
    InconsistentQuotes { tenor: f64, reason: String },

    /// A quote pair admits a static arbitrage.
    #[error("arbitrage: {0}")]
    Arbitrage(String),

    /// The hazard curve does not reprice the quoted CDS spread.
    #[error("hazard curve not calibrated to quotes: par spread {par} vs quoted {quoted}")]
    NotCalibrated { par: f64, quoted: f64 },

    /// A ratio of expectations with a vanishing denominator.
    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    /// Quadrature or another numerical scheme failed to converge.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("parse error:\n{}", format_rows(.0))]
    Parse(Vec<RowError>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
