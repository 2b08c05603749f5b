use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("pole of {what} at alpha = {alpha}")]
    Pole { what: &'static str, alpha: String },
    #[error("alpha = {0} is exceptional; use the exceptional-value formulas")]
    Exceptional(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("ill-conditioned design matrix (condition number {cond:.3e}); shrink the t window or the number of fitted terms")]
    IllConditioned { cond: f64 },
    #[error("tolerance {requested:.3e} not reached; achieved {achieved:.3e}")]
    Tolerance { requested: f64, achieved: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
