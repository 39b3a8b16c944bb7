use thiserror::Error;

/// Errors raised by the numerical routines and the report layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A truncated product or series did not reach the requested tolerance
    /// within the term budget. Carries the best value and the bound achieved.
    #[error("truncation did not reach tolerance after {terms} terms: best value {best}, bound {bound:e}")]
    Truncation { best: f64, bound: f64, terms: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
