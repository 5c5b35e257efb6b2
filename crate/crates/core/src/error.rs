use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coincident nodes (min gap {min_gap:e}) need derivative of order {required}, function provides {available}")]
    CoincidentNodes {
        min_gap: f64,
        required: usize,
        available: usize,
    },

    #[error("derivative of order {required} requested, function provides up to {available}")]
    InsufficientDerivatives { required: usize, available: usize },

    #[error("matrix is not Hermitian: max |A - A*| = {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("function is not evaluable at {point}")]
    EvaluationDomain { point: f64 },

    #[error("symbol arity {symbol} does not match {operands} spectral operands")]
    ArityMismatch { symbol: usize, operands: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("symmetrization is missing the permutation {0:?}")]
    MissingPermutation(Vec<usize>),

    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    InvalidP(f64),

    #[error("Hölder exponents inconsistent: 1/p = {target}, sum of 1/p_j = {sum}")]
    HolderMismatch { target: f64, sum: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
