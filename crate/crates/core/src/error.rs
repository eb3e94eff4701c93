use thiserror::Error;

use crate::homalg::ValidationReport;
use crate::rational::{format, Rational};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid complex:\n{0}")]
    Invalid(ValidationReport),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("threshold {} is degenerate: generator {id} has exactly that action", format(.threshold))]
    LDegenerate { id: String, threshold: Rational },

    #[error("action tie: {first} and {second} both have action {}", format(.action))]
    ActionTie {
        first: String,
        second: String,
        action: Rational,
    },

    #[error("missing U-map on {0}")]
    MissingUmap(&'static str),

    #[error("handle action too large: {0}")]
    EpsTooLarge(String),

    #[error("invalid homotopy K: {0}")]
    InvalidHomotopy(String),

    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),

    #[error("class is zero in homology")]
    ZeroClass,

    #[error("not a cycle: {0}")]
    NotACycle(String),

    #[error("degenerate orbit: {0}")]
    Degenerate(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("mismatched base: {0}")]
    MismatchedBase(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Parse and I/O failures, as opposed to precondition or validation
    /// failures on well-formed input.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_) | Error::Json(_))
    }
}
