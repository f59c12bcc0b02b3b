//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, operator assembly and solves.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation argument violates its precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A spectral parameter lies on or too close to [0, inf), or misses
    /// the stricter threshold required by a Schatten-type reduction.
    #[error("spectral parameter out of range: {0}")]
    SpectralParameter(String),

    /// A linear system was singular or too ill-conditioned to solve.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// A dense operation was requested beyond the size limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Propagated LAPACK failure (e.g. SVD non-convergence).
    #[error("linear algebra backend: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::GridMismatch(msg.into())
    }

    pub(crate) fn spectral(msg: impl Into<String>) -> Self {
        Error::SpectralParameter(msg.into())
    }

    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        Error::SingularSystem(msg.into())
    }

    pub(crate) fn size_limit(msg: impl Into<String>) -> Self {
        Error::SizeLimit(msg.into())
    }
}
