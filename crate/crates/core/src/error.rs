use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the decision pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial degree {degree} exceeds the dense conversion limit of {limit}")]
    DegreeTooLarge { degree: u64, limit: u64 },

    #[error("invalid exponent tuple {exponents:?}: {reason}")]
    InvalidTuple { exponents: Vec<u64>, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric and exact cyclotomic tests disagree: {0}")]
    Inconclusive(String),

    #[error("cannot parse polynomial {text:?}: {reason}")]
    PolynomialParse { text: String, reason: String },

    #[error("store {path}: {reason}")]
    Store { path: PathBuf, reason: String },

    #[error("oracle disagreement on {exponents:?}: {detail}")]
    OracleDisagreement { exponents: Vec<u64>, detail: String },

    #[error("theorem-backed bound violated for {exponents:?}: {detail}")]
    BoundViolation { exponents: Vec<u64>, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
