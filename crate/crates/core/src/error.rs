use thiserror::Error;

/// Errors produced by table loading, domain validation, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}:{line}: parse error: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("table invariant violated: {0}")]
    InvariantViolation(String),

    #[error("sigma {sigma} outside table coverage [{lo}, {hi}]")]
    OutOfCoverage { sigma: f64, lo: f64, hi: f64 },

    #[error("zeros file ends at ordinate {last} but a sum up to {requested} was requested; file declares no height covering it")]
    ZerosTruncated { last: f64, requested: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
