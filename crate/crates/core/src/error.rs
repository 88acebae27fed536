use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions {n_a}x{n_b}: each subsystem needs dimension >= 2")]
    InvalidDims { n_a: usize, n_b: usize },

    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0}")]
    DimsMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix has eigenvalue {0:e} below the positivity tolerance")]
    NegativeEigenvalue(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("vectors are not orthonormal (max Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} diverges at this argument")]
    Divergent(&'static str),

    #[error("numerical routine failed: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
