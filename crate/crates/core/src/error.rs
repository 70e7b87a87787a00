use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {violation:e} exceeds {tolerance:e}")]
    NotHermitian { violation: f64, tolerance: f64 },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("dimension signature {signature:?} does not describe side length {side}")]
    SignatureMismatch { signature: Vec<usize>, side: usize },

    #[error("invalid factor selection: {0}")]
    InvalidFactors(String),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size budget exceeded for {what}: required {required}, allowed {allowed}")]
    BudgetExceeded {
        what: &'static str,
        required: usize,
        allowed: usize,
    },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not an isometry: max |V^dagger V - I| = {deviation:e}")]
    NotIsometry { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("ensemble size {size} is smaller than rank {rank}")]
    EnsembleTooSmall { size: usize, rank: usize },

    #[error("cannot write report to {path}: {message}")]
    Output { path: String, message: String },

    #[error("operand not supported on the antisymmetric coordinate space: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
