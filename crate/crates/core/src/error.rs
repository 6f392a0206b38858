use thiserror::Error;

/// Errors produced by state construction, the Fock oracle and the optimizer.
#[derive(Debug, Error)]
pub enum BellError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "truncation too small: dim {dim} does not admit amplitude sum {amplitude} \
         (diagnostic {diagnostic:e} exceeds {tolerance:e})"
    )]
    TruncationTooSmall {
        dim: usize,
        amplitude: f64,
        diagnostic: f64,
        tolerance: f64,
    },

    #[error("no sign change on bracket [{lo}, {hi}] for {what}")]
    NoBracket { what: String, lo: f64, hi: f64 },

    #[error("stationarity system for regime {regime} does not apply to scheme {scheme}")]
    RegimeMismatch { regime: String, scheme: String },
}

pub type Result<T> = std::result::Result<T, BellError>;
