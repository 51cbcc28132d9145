//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group {group} has no observations")]
    EmptyGroup { group: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("statistic requires exactly two groups, got {got}")]
    NotTwoGroups { got: usize },

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("p-value out of range (0,1]: {value}")]
    OutOfRangeP { value: f64 },

    #[error("invalid permutation plan: {reason}")]
    InvalidPlan { reason: String },

    #[error("exact enumeration of {assignments} assignments exceeds cap {cap}")]
    TooManyAssignments { assignments: u128, cap: u64 },

    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: String },

    #[error("invalid pipeline configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("column not found: {name}")]
    MissingColumn { name: String },

    #[error("cannot parse value {value:?} at row {row}, column {col}")]
    ParseValue { value: String, row: usize, col: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by invalid user input (data or configuration),
    /// as opposed to I/O failures. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}
