use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {context} (bound {bound})")]
    IndexOutOfRange {
        index: usize,
        bound: usize,
        context: &'static str,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is numerically singular at pivot {pivot} (|d| = {value:e})")]
    Singular { pivot: usize, value: f64 },

    #[error("relative residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("corrector system for element {element}, coarse dof {dof:?} failed: {source}")]
    LocalSolve {
        element: usize,
        dof: Option<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coarse element {element} contains no network node")]
    EmptyCoarseElement { element: usize },

    #[error("patch of element {element} contains no free degree of freedom")]
    EmptyPatch { element: usize },

    #[error("prolongation has linearly dependent columns (B_H^T B_H pivot {pivot})")]
    RankDeficientProlongation { pivot: usize },

    #[error("quadratic form is negative ({value:e}); operator is not positive semi-definite")]
    NegativeEnergy { value: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
