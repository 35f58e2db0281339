use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Coefficients from ℚ(√d) and ℚ(√d') with d ≠ d' were combined.
    #[error("field mismatch: sqrt({0}) and sqrt({1}) cannot be mixed")]
    FieldMismatch(String, String),

    #[error("degree {degree} exceeds the configured ceiling {cap}")]
    Capacity { degree: usize, cap: usize },

    #[error("degenerate Mobius transformation (ad - bc = 0)")]
    InvalidTransform,

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("division by the zero polynomial at byte {pos}")]
    DivisionByZero { pos: usize },

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("path tracking failed: {0}")]
    Tracking(String),

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error("bad orbifold: {0}")]
    BadOrbifold(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Budget, precision and tracking failures (as opposed to bad input).
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Capacity { .. } | Error::Precision(_) | Error::Tracking(_) | Error::Budget(_)
        )
    }
}
