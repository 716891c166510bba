use thiserror::Error;

use crate::arith::Rat;
use crate::network::ShapeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rational `{text}`: {reason}")]
    ParseRat { text: String, reason: &'static str },

    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),

    #[error("malformed polynomial `{text}`: {reason}")]
    ParsePoly { text: String, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix must have at least one row and one column, with rows of equal length")]
    MalformedMatrix,

    #[error("a piecewise-linear function needs at least one piece")]
    EmptyPieces,

    #[error("scalar {0} is negative; max does not commute with negative scaling")]
    NegativeScale(Rat),

    #[error("matrix entry ({row}, {col}) is negative")]
    NegativeEntry { row: usize, col: usize },

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("redundancy is undefined for an envelope with a single piece")]
    SingletonEnvelope,

    #[error("invalid network: {0}")]
    Shape(#[from] ShapeError),

    #[error("piece count {required} exceeds the cap of {cap}")]
    PieceCap { required: u64, cap: u64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("scale factor {0} must be strictly positive")]
    NonPositiveScale(Rat),

    #[error("layer {layer} has no successor layer to absorb the transform")]
    LastLayer { layer: usize },

    #[error("the two envelopes are equal; no separating point exists")]
    EnvelopesEqual,

    #[error("formula outside the decidable fragment: {0}")]
    Fragment(String),

    #[error("unassigned free variable `{0}`")]
    Unassigned(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PieceCap { .. } => 3,
            _ => 2,
        }
    }
}
