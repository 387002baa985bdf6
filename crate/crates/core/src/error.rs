use thiserror::Error;

use crate::algebra::{GeneratorId, Parity};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{context}: expected {expected} parity, found {found}")]
    Parity {
        context: String,
        expected: &'static str,
        found: Parity,
    },

    #[error("generator {0} is not a bound variable here")]
    UnknownVariable(GeneratorId),

    #[error("variable sets do not match: {0}")]
    VariableMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time must be positive and finite, got {0}")]
    InvalidTime(f64),

    #[error("times must be strictly increasing")]
    NonIncreasingTimes,

    #[error("element references increment slice {slice} but the partition has {steps} steps")]
    UndeclaredSlice { slice: u32, steps: usize },

    #[error("Brownian dimension must be even and positive, got {0}")]
    OddDimension(usize),

    #[error("{steps} steps exceeds the brute-force cap of {cap}")]
    CapExceeded { steps: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn parity(context: impl Into<String>, expected: &'static str, found: Parity) -> Self {
        Error::Parity {
            context: context.into(),
            expected,
            found,
        }
    }
}
