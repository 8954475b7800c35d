use crate::prelude::*;

/// Errors raised by the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("band width W = {w} wraps around a torus of side L = {l} (need 2 <= 2W < L)")]
    BandWraps { w: usize, l: usize },
    #[error("profile mass M = {m} is below 2")]
    DegenerateMass { m: f64 },
    #[error("dimension d = {d} is not supported here")]
    UnsupportedDimension { d: usize },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("symbol has imaginary part {max_imag:e}; the profile is not even")]
    AsymmetricSymbol { max_imag: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("vector length {got} does not match N = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("request too large for the brute-force path: {0}")]
    Oversize(String),
    #[error("alpha = {re}{im:+}i violates |alpha| <= 1 and |1 - alpha| >= 4/M + (W/L)^2")]
    AlphaOutOfRange { re: f64, im: f64 },
    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },
    #[error("truncation budget exhausted with tail bound {tail:e}")]
    Truncation { tail: f64 },
    #[error("form does not match the window: {0}")]
    FormMismatch(String),
    #[error("singular mode: alpha * lambda = 1")]
    SingularMode,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
