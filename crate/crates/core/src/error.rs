//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A product left the materialized degree range of a truncated algebra.
    /// Results above the cutoff are unknown, so the operation cannot proceed.
    #[error("degree overflow: product lands in degree {degree}, materialized only through degree {top} in `{algebra}`")]
    DegreeOverflow {
        algebra: String,
        degree: u32,
        top: u32,
    },

    /// Two objects that must share an ambient algebra or cutoff do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// An input violated a structural precondition (bad degree, unknown
    /// name, no unit, non-surjective map where one is required, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An algebra or morphism failed axiom validation; the report lists
    /// every violation with a witness.
    #[error("validation failed:\n{0}")]
    Validation(String),

    /// Text input could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A degree-by-degree construction did not stabilize within its safety
    /// bound (only reachable outside the supported connected setting).
    #[error("construction did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }
}
