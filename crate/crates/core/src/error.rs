use thiserror::Error;

/// Errors produced by the solvers, the instance loader and the CLI harness.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("promise violated at {coord:?}: {reason}")]
    PromiseViolation { coord: Vec<usize>, reason: String },

    #[error("entry bound {bound} is outside the supported range [1, {max}]")]
    BoundOutOfRange { bound: i64, max: i64 },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("invalid modulus parameter M = {0}: must be a positive multiple of 100")]
    InvalidPromiseModulus(i64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("field characteristic {modulus} too small to count up to {needed}")]
    FieldTooSmall { modulus: u64, needed: u64 },

    #[error("transform length {len} not supported by the field (max {max})")]
    TransformTooLong { len: usize, max: usize },

    #[error("ring order mismatch: {0} vs {1}")]
    RingMismatch(usize, usize),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("instance too large for the brute-force oracle ({work} > limit {limit})")]
    OracleLimit { work: u64, limit: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::PromiseViolation { .. } => "promise-violation",
            Error::BoundOutOfRange { .. } => "bound-out-of-range",
            Error::Overflow(_) => "overflow",
            Error::InvalidPromiseModulus(_) => "invalid-promise-modulus",
            Error::Config(_) => "config",
            Error::FieldTooSmall { .. } => "field-too-small",
            Error::TransformTooLong { .. } => "transform-too-long",
            Error::RingMismatch(..) => "ring-mismatch",
            Error::OutOfRange { .. } => "out-of-range",
            Error::OracleLimit { .. } => "oracle-limit",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Internal(_) => "internal",
        }
    }

    /// Offending coordinate, when the error has one.
    pub fn coord(&self) -> Option<&[usize]> {
        match self {
            Error::PromiseViolation { coord, .. } => Some(coord),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
