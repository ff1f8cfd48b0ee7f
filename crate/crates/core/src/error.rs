use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the estimation routines.
///
/// Variants fall in two groups: data/domain problems (bad inputs, data
/// outside a distribution's support) and numeric-regime problems (a
/// posterior parameter left its valid range, a series refused to converge).
/// [`Error::is_numeric_regime`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no information: {0}")]
    NoInformation(String),
    #[error("improper posterior: {0}")]
    Improper(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("unsupported mapping: {0}")]
    UnsupportedMapping(String),
    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),
    #[error("invalid model: {0}")]
    Spec(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("degenerate posterior: {0}")]
    Degenerate(String),
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("series diverges: {0}")]
    Divergence(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("grid coverage: {0}")]
    Coverage(String),
}

impl Error {
    /// True for failures caused by the numeric regime rather than by bad input.
    pub fn is_numeric_regime(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_)
                | Error::InvalidRegime(_)
                | Error::Divergence(_)
                | Error::Convergence(_)
                | Error::Coverage(_)
        )
    }
}

pub(crate) fn ensure(cond: bool, err: impl FnOnce() -> Error) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(err())
    }
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
