//! Error types shared across the crate.

use thiserror::Error;

/// Errors from interval arithmetic and term evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    /// The argument interval wholly violates a function's domain.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// A variable or shape mismatch between operands.
    #[error("shape error: {0}")]
    Shape(String),
}

/// Errors from box-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("boxes are over different variable sets")]
    VarSetMismatch,
    #[error("cannot split: all dimensions are degenerate")]
    CannotSplit,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Errors from validated integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    /// Step control cannot certify progress at the minimum step size.
    #[error("step underflow at t={0}")]
    StepUnderflow(f64),
    #[error("field evaluation failed: {0}")]
    Eval(#[from] NumericError),
}
