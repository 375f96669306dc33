use thiserror::Error;

/// Errors raised by the numerical laboratory.
///
/// Numeric payloads are stored as `f64` so the error type stays independent
/// of the scalar parameter of the routine that produced it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed boundary description: {0}")]
    Malformed(String),

    #[error("boundary is not closed: {0}")]
    NotClosed(String),

    #[error("boundary parametrization has zero speed near s = {s}")]
    ZeroSpeed { s: f64 },

    #[error("frequency must lie strictly inside (0, 1), got {0}")]
    LambdaOutOfRange(f64),

    #[error("critical point refinement failed: {0}")]
    RefinementFailure(String),

    #[error("domain is not simple at lambda = {lambda}: {detail}")]
    NotSimple { lambda: f64, detail: String },

    #[error("rotation number is rational ({p}/{q})")]
    RationalRotation { p: u64, q: u64 },

    #[error("cohomological right-hand side has mean {mean:e} (norm {norm:e})")]
    NonZeroMean { mean: f64, norm: f64 },

    #[error("resonant small divisor at k = {k}: |1 - exp(2 pi i k alpha)| = {divisor:e}")]
    ResonantDivisor { k: i64, divisor: f64 },

    #[error("conjugacy residual {residual:e} exceeds tolerance {tolerance:e}")]
    ConjugacyResidual { residual: f64, tolerance: f64 },

    #[error("conjugacy is not monotone on the verification grid")]
    ConjugacyNotMonotone,

    #[error("rotation number {0} is not reached for lambda in (0, 1)")]
    Unreachable(f64),

    #[error("matrix is singular or not positive definite")]
    SingularMatrix,

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("forcing not resolved by the mode cutoff: tail estimate {tail:e} above {tolerance:e}")]
    UnresolvedForcing { tail: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
