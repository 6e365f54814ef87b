use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension overflow: {entries} entries exceeds budget {budget}")]
    DimensionOverflow { entries: u128, budget: usize },

    #[error("invalid factor index {index} for {factors} factors")]
    InvalidFactor { index: usize, factors: usize },

    #[error("element is not unitary (max ||c~_k| - 1| = {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("operator is not unitary (max |U^dag U - I| = {deviation:e})")]
    NonUnitaryOperator { deviation: f64 },

    #[error("invalid spin labels: {0}")]
    InvalidSpin(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("integer overflow: {0}")]
    Overflow(String),
}

impl Error {
    /// Whether the error signals a failed internal cross-check rather than bad input.
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
