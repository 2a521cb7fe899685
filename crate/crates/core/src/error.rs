use thiserror::Error;

use crate::ols::Violation;
use crate::tensor::FlatteningId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("local dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("malformed tensor file: {0}")]
    MalformedTensor(String),

    #[error("non-finite coefficient at linear index {0}")]
    NonFinite(usize),

    #[error("no built-in orthogonal Latin square of order {0} (available: 3, 4, 5)")]
    UnsupportedOrder(usize),

    #[error("cyclic construction needs an odd order >= 3, got {0}")]
    EvenOrder(usize),

    #[error("not an orthogonal Latin square ({} violations)", .0.len())]
    InvalidOls(Vec<Violation>),

    #[error("coefficient at linear index {0} is not a small rational; exact tangent solving needs an exact seed")]
    NonRationalEntry(usize),

    #[error("flattening subset must not be empty")]
    EmptyFlatteningSubset,

    #[error("matrix is not skew-Hermitian (residual {residual:.3e})")]
    NotSkewHermitian { residual: f64 },

    #[error("{flattening} flattening of the base tensor is not unitary (residual {residual:.3e})")]
    NotUnitary {
        flattening: FlatteningId,
        residual: f64,
    },

    #[error(
        "direction is not tangent at the base point under {flattening} (residual {residual:.3e})"
    )]
    NotTangent {
        flattening: FlatteningId,
        residual: f64,
    },

    #[error("Hermitian eigensolver did not converge")]
    EigenFailure,

    #[error("tensor is zero")]
    ZeroTensor,

    #[error("deviations are below the noise floor at every scale; no slope to fit")]
    CannotFit,

    #[error("unknown basis vector name `{0}`")]
    UnknownVector(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
