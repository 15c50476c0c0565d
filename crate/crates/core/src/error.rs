use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at s = {0}")]
    Pole(String),

    #[error("requested precision unreachable: tail estimate {estimate:e} exceeds target {target:e}")]
    PrecisionUnreachable { estimate: f64, target: f64 },

    #[error("|L| = {modulus:e} at sigma = {sigma}, t = {t} is numerically zero")]
    NearZero { sigma: f64, t: f64, modulus: f64 },

    #[error("argument continuation failed at t = {t}: {reason}")]
    Path { t: f64, reason: String },

    #[error("prime cutoff {cutoff} insufficient: tail bound {tail_bound:e} exceeds tolerance {tolerance:e}")]
    InsufficientCutoff {
        cutoff: u64,
        tail_bound: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("series truncation error {bound:e} above limit {limit:e}")]
    Truncation { bound: f64, limit: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e}")]
    Quadrature { estimate: f64 },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
