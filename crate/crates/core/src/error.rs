use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has no entries")]
    Empty,

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e}, norm {norm:e})")]
    NotPsd { min_eig: f64, norm: f64 },

    #[error("power {exponent} undefined: eigenvalue {eigenvalue:e} is below the strict positivity floor {floor:e}")]
    Domain {
        exponent: f64,
        eigenvalue: f64,
        floor: f64,
    },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal residual {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("trace has imaginary residue {imag:e} against value {real:e}")]
    ImaginaryResidue { real: f64, imag: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("serialization failed: {0}")]
    Serialization(String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn in_trial(self, trial: usize) -> Self {
        Error::Trial {
            trial,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
