use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument outside the operation's domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Segment lengths that do not tile the signal vector.
    #[error("layout error: {0}")]
    Layout(String),

    /// A region that is unbounded or empty where a bounded polytope is required.
    #[error("structural error: {0}")]
    Structural(String),

    /// Fourier-Motzkin derived `0 <= b` with `b < 0`.
    #[error("infeasible system: {0}")]
    Infeasible(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("target ({r1}, {r2}) is not achievable: {reason}")]
    InfeasibleTarget { r1: i64, r2: i64, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A scheme whose plans cannot be executed as written (missing knowledge,
    /// causality violation, a segment below a receiver's noise floor).
    #[error("scheme error: {0}")]
    Scheme(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
