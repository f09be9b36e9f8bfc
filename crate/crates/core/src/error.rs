use thiserror::Error;

/// Errors raised by the quantization, fitting and index routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("point ({u}, {v}, {w}) is not on the unit sphere")]
    NotOnSphere { u: f64, v: f64, w: f64 },

    #[error("polynomial degree {degree} exceeds quadrature exactness {exactness}")]
    DegreeOverflow { degree: usize, exactness: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("quadrature grid exact to degree {available}, but {required} is needed")]
    InsufficientGrid { required: usize, available: usize },

    #[error("section space at N = {level}, k0 = {k0} is empty")]
    EmptySpace { level: i64, k0: i64 },

    #[error("geometric quantization needs N >= 1 (got N = {0})")]
    ZeroLevel(i64),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("operands live over different phase spaces (n = {left} vs n = {right})")]
    PhaseSpaceMismatch { left: usize, right: usize },

    #[error("hbar power {0} is below the allowed minimum")]
    HbarPower(i32),

    #[error("spectral gap {gap:.3e} around 1/2 is below the threshold {threshold}; level too small")]
    SpectralGap { gap: f64, threshold: f64 },

    #[error("idempotent lift did not converge: residual {residual:.3e} after {iterations} steps")]
    LiftDiverged { residual: f64, iterations: usize },

    #[error("characters do not span H^0 + H^2: {0}")]
    InsufficientSpan(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
