use thiserror::Error;

use crate::parwin::ContentionEvent;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A polynomial does not permute Z_N. `first` and `second` are the
    /// smallest pair of inputs sharing `value`.
    #[error("not a permutation: f({first}) = f({second}) = {value}")]
    NotPermutation { first: u64, second: u64, value: u64 },

    #[error("invalid interleaver: {0}")]
    InvalidInterleaver(String),

    #[error("polynomial degree {degree} exceeds composition limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },

    #[error("construction failed after {attempts} attempts")]
    ConstructionFailed { attempts: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("memory contention: {0}")]
    Contention(Box<ContentionEvent>),

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
