use thiserror::Error;

/// Errors raised by model construction and evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n = {n} is not divisible by m = {m}")]
    NotDivisible { n: usize, m: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("decision index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("configuration has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("bit value {0} is not 0 or 1")]
    NotBinary(u8),

    #[error("block {start}..{end} is not one of the manager partitions")]
    MisalignedBlock { start: usize, end: usize },

    #[error("hill-climbing spec infeasible: {count} options at distance {distance}, only {available} exist")]
    InfeasibleSpec {
        count: usize,
        distance: usize,
        available: usize,
    },

    #[error("malformed landscape: {0}")]
    MalformedLandscape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
