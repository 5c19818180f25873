use thiserror::Error;

/// Failure modes of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the supported domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Result is not representable; the message names the alternative entry point.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge on [{a}, {b}]: estimate {value:e}, error {abs_err:e} after {subdivisions} subdivisions")]
    Quadrature { a: f64, b: f64, value: f64, abs_err: f64, subdivisions: usize },

    /// Inconsistent configuration object.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
