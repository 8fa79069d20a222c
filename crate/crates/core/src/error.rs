use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// Errors raised by the geometry, measurement and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {coord} = {value} lies outside the model domain")]
    Domain { coord: usize, value: f64 },

    #[error("point violates the model constraint (slack {slack:e})")]
    Constraint { slack: f64 },

    #[error("state norm deviates from one by {deviation:e}")]
    Norm { deviation: f64 },

    #[error("finite-difference step {step:e} is invalid for coordinate {coord}")]
    Step { coord: usize, step: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parameter index {index} out of range for {dim} parameters")]
    Index { index: usize, dim: usize },

    #[error("invalid parameter point: {0}")]
    InvalidPoint(String),

    #[error("determinant {0:e} is negative beyond tolerance")]
    NegativeDeterminant(f64),

    #[error("metric kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("matrix is singular: {0}")]
    Singular(&'static str),

    #[error("derivative directions are parallel (sin alpha = {sin_alpha:e})")]
    DegenerateDirection { sin_alpha: f64 },

    #[error("direction {mu} has vanishing speed (g_mumu = {g:e})")]
    DegenerateSpeed { mu: usize, g: f64 },

    #[error("mismatch radius must be positive, got {0}")]
    Radius(f64),

    #[error("optimizer did not converge after {iterations} iterations: {reason}")]
    Convergence {
        iterations: usize,
        reason: &'static str,
    },

    #[error("maximum-likelihood estimate lies on the prior box boundary")]
    Boundary { estimate: Vec<f64> },

    #[error("need at least {needed} successful trials, got {got}")]
    InsufficientTrials { needed: usize, got: usize },

    #[error("Bargmann index k = {0} must exceed 1/2")]
    KRange(f64),

    #[error("integration tail {tail:e} exceeds bound for level {level}")]
    Tail { level: usize, tail: f64 },

    #[error("no sample fell inside the integration domain")]
    DomainSampling,

    #[error("truncated expansion loses {deviation:e} of the norm on the configured domain")]
    Truncation { deviation: f64 },

    #[error("unknown model or coordinate: {0}")]
    Unknown(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

/// Numerical-quality conditions that do not invalidate a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Richardson extrapolation of the radius ladder did not settle.
    Extrapolation { residual: f64, threshold: f64 },
    /// Some estimation trials were dropped.
    DroppedTrials { dropped: usize },
    /// Hermiticity repair removed more than the expected rounding.
    Hermiticity { deviation: f64 },
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Warning::Extrapolation {
                residual,
                threshold,
            } => write!(
                f,
                "extrapolation residual {residual:e} exceeds {threshold:e}"
            ),
            Warning::DroppedTrials { dropped } => write!(f, "{dropped} trials dropped"),
            Warning::Hermiticity { deviation } => {
                write!(f, "hermiticity repair removed {deviation:e}")
            }
        }
    }
}
