use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Arguments outside the supported domain (bad `m`, lowest weight, tolerance, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative or adaptive routine failed to reach its tolerance.
    /// `best_estimate` carries whatever the routine had when it gave up.
    #[error("numerical failure in {routine}: {detail} (best estimate {best_estimate:e})")]
    NumericalFailure {
        routine: &'static str,
        detail: String,
        best_estimate: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(routine: &'static str, detail: impl Into<String>, best: f64) -> Self {
        Error::NumericalFailure {
            routine,
            detail: detail.into(),
            best_estimate: best,
        }
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalFailure { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
