//! Error type shared across the library.

use crate::scalar::FieldTag;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("mixed field tags: expected {expected}, found {found}")]
    MixedField { expected: FieldTag, found: FieldTag },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("input is not homogeneous: term {term} has degree {got}, expected {expected}")]
    NonHomogeneous {
        term: String,
        got: usize,
        expected: usize,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("zero form not allowed here")]
    ZeroForm,

    #[error("no witness: requested minor size {requested} exceeds rank {rank}")]
    NoWitness { requested: usize, rank: usize },

    #[error("Hilbert function did not stabilize by t = {t_max}; raise t_max (the ideal may not be zero-dimensional)")]
    Unstable { t_max: usize },

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("unsupported flattening for this operation: {0}")]
    UnsupportedSpec(String),

    #[error("spec list must be nonempty")]
    EmptySpecList,

    #[error("decomposition must be nonempty")]
    EmptyDecomposition,
}

pub type Result<T> = std::result::Result<T, Error>;
