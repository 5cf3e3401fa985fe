use thiserror::Error;

/// Which side a bracketing function kept when no sign change was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Sign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("formula domain violation in {formula}: {detail}")]
    Domain {
        formula: &'static str,
        detail: String,
    },

    #[error("no root of {what} on the bracket: function is {sign:?} throughout")]
    NoRoot { what: &'static str, sign: Sign },

    #[error("field is identically zero")]
    ZeroField,

    #[error("grid: {0}")]
    Grid(String),

    #[error("minimizer did not converge after {iterations} iterations (best value {best_value:e})")]
    NonConvergence { iterations: usize, best_value: f64 },

    #[error("classifier inconsistency: {0}")]
    Inconsistent(String),

    #[error("eigensolver: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
