//! Error type shared across the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by model construction, evaluation, estimation and IO.
#[derive(Debug, Error)]
pub enum Error {
    /// A probability argument lies outside the open unit interval.
    #[error("probability {0} is outside (0, 1)")]
    ProbabilityDomain(f64),

    /// A model object failed validation.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// Two alternatives never become indifferent inside the evaluation range.
    #[error("no indifference point inside the evaluation range")]
    NoCrossing,

    /// More than one indifference point was found for a bundle pair.
    #[error("bundle pair has {} indifference points", roots.len())]
    MultipleCrossings { roots: Vec<f64> },

    /// The requested coefficient has no base price inside the search range.
    #[error("coefficient {0} has no indifference base price inside the search range")]
    OutOfRange(f64),

    /// Consideration events must use disjoint included and excluded sets.
    #[error("included and excluded bundle sets overlap")]
    Overlap,

    /// The grid is too large for exhaustive enumeration.
    #[error("{bundles} bundles exceed the enumeration limit of {limit}")]
    Size { bundles: usize, limit: usize },

    /// The consideration parameters satisfy neither identification branch.
    #[error("consideration parameters satisfy neither identification branch")]
    MicViolation,

    /// Estimation failed before producing any estimate.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// A data file could not be parsed.
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
