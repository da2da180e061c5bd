//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by analytic and simulation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Structural parameters are outside their domain (`0 < k < n`, positive rates, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A state index lies outside the chain `0 ..= n - k + 1`.
    #[error("state index {index} outside 0..={max}")]
    InvalidState { index: usize, max: usize },

    /// Transform evaluation requested left of the imaginary axis.
    #[error("transform frequency must satisfy Re(s) >= 0, got Re(s) = {re}")]
    FrequencyDomain { re: f64 },

    /// A time argument was negative.
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    /// A factorial or power left the representable f64 range.
    #[error("value outside supported range: {0}")]
    Range(String),

    /// The requested evaluation method does not apply to the discipline.
    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    /// A linear solve or determinant hit a pivot indistinguishable from zero.
    #[error("numerical conditioning failure: {0}")]
    Conditioning(String),

    /// The Laplace inversion oscillation diagnostic tripped.
    #[error("laplace inversion unstable: {0}")]
    InversionUnstable(String),

    /// Two independent routes to the same quantity disagreed beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

/// How a caller should classify an error when mapping to process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The request itself was malformed.
    Usage,
    /// The computation failed numerically.
    Numerical,
}

impl Error {
    /// Classify this error as a usage problem or a numerical failure.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidState { .. }
            | Error::FrequencyDomain { .. }
            | Error::NegativeTime(_)
            | Error::Range(_)
            | Error::UnsupportedMethod(_) => ErrorClass::Usage,
            Error::Conditioning(_)
            | Error::InversionUnstable(_)
            | Error::InternalConsistency(_) => ErrorClass::Numerical,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
