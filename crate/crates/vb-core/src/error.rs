use thiserror::Error;

/// Errors produced by graph/signal sampling, decoding and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Two rules proposed different values for the same variable within one
    /// round. This cannot happen without a value collision (false
    /// verification), so it is surfaced as a diagnostic rather than resolved.
    #[error("conflicting verification values for variable {variable}: {first} vs {second}")]
    FalseVerificationConflict {
        variable: usize,
        first: f64,
        second: f64,
    },

    #[error("threshold search verdicts are not monotone: {0}")]
    NonMonotoneVerdicts(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
