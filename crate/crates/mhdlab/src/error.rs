//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by solution construction, evaluation, and diagnostics.
#[derive(Debug, Error)]
pub enum MhdError {
    /// A named parameter set violates the constraints of a family.
    /// Each entry names one violated constraint in `param: requirement` form.
    #[error("invalid parameters for {family}: {}", violations.join("; "))]
    InvalidParams { family: String, violations: Vec<String> },

    /// Evaluation request outside the validity domain of a solution.
    #[error("point outside the domain of {family}: {reason}")]
    OutsideDomain { family: String, reason: String },

    /// Cylindrical components cannot be mapped to Cartesian on the axis.
    #[error("cylindrical components are undefined on the axis (x = y = 0)")]
    AxisSingularity,

    /// A requested solution family or sub-case identifier does not exist.
    #[error("unknown solution family `{0}`")]
    UnknownFamily(String),

    /// An adaptive integration failed to reach the requested accuracy.
    #[error("ODE solver failed: {0}")]
    Solver(String),

    /// A special-function evaluation left its supported domain.
    #[error("special function domain error: {0}")]
    SpecialFunction(String),

    /// Malformed textual input (parameter assignments, generator combos,
    /// grid or loop descriptors).
    #[error("parse error: {0}")]
    Parse(String),

    /// A numeric diagnostic could not be completed.
    #[error("diagnostic failed: {0}")]
    Diagnostic(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl MhdError {
    pub fn outside_domain(family: impl Into<String>, reason: impl Into<String>) -> Self {
        MhdError::OutsideDomain { family: family.into(), reason: reason.into() }
    }

    pub fn invalid_params(family: impl Into<String>, violations: Vec<String>) -> Self {
        MhdError::InvalidParams { family: family.into(), violations }
    }
}

/// Free-function form of [`MhdError::outside_domain`], for terser call sites.
pub fn outside_domain(family: impl Into<String>, reason: impl Into<String>) -> MhdError {
    MhdError::outside_domain(family, reason)
}

pub type Result<T> = std::result::Result<T, MhdError>;
