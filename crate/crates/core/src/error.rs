//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by spec validation, operator evaluation, the exact
/// oracles, and the sampling pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A weight is zero (index is 0-based).
    #[error("weight at index {index} is zero")]
    InvalidWeight { index: usize },

    /// The weight list is empty.
    #[error("weight list is empty")]
    EmptySpec,

    /// A degrees-of-freedom entry is not strictly positive (index is 0-based).
    #[error("degrees of freedom at index {index} must be positive")]
    InvalidDof { index: usize },

    /// Weight and dof lists have different lengths.
    #[error("{weights} weights but {dofs} dof entries")]
    LengthMismatch { weights: usize, dofs: usize },

    /// A 0-based weight index is out of range.
    #[error("index {index} out of range for {r} weights")]
    BadIndex { index: usize, r: usize },

    /// A scalar string is neither a decimal nor a `p/q` rational.
    #[error("cannot parse scalar {text:?}: {reason}")]
    ParseScalar { text: String, reason: String },

    /// A float-only function family was evaluated in exact rational mode.
    #[error("{family} functions evaluate in float mode only")]
    ModeUnsupported { family: &'static str },

    /// An exact coefficient-table identity failed; this signals an
    /// implementation bug, never a user error.
    #[error("coefficient table identity {identity:?} violated: {detail}")]
    InternalInconsistency { identity: &'static str, detail: String },

    /// The exact operator expectation was nonzero for a polynomial test
    /// function; signals an implementation bug.
    #[error("operator expectation {value} != 0 ({form} form)")]
    TheoremViolation { value: String, form: &'static str },

    /// The integration-by-parts residual was nonzero; signals an
    /// implementation bug.
    #[error("integration-by-parts residual {value} != 0")]
    LemmaViolation { value: String },

    /// A count argument is below its minimum.
    #[error("count {given} is below the minimum {min}")]
    BadCount { given: usize, min: usize },

    /// Shard count must be positive.
    #[error("shard count must be positive")]
    BadShards,

    /// An exponential test function fails a moment bound for the target
    /// law; `index` (0-based) names the first violating weight.
    #[error("exponential function fails the {check} bound at weight index {index} (2s*lambda scaled product {product} >= 1)")]
    NotIntegrable {
        check: &'static str,
        index: usize,
        product: f64,
    },

    /// Input data contains NaN or an infinity (row is 0-based).
    #[error("data contains a non-finite value at row {row}")]
    NonFiniteData { row: usize },

    /// A function battery must contain at least one function.
    #[error("function battery is empty")]
    EmptyBattery,

    /// A function battery contains the same function twice.
    #[error("function battery has a duplicate entry at index {index}")]
    DuplicateFunction { index: usize },
}
