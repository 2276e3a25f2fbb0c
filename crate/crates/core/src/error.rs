//! Error type shared across the workbench.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("form degree {0} exceeds 4")]
    DegreeError(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("parameter `{name}` out of range: {detail}")]
    ParamOutOfRange { name: String, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point is not critical (jacobian rank {0})")]
    NotCritical(usize),
    #[error("point is not on the zero set (max |coefficient| = {0:e})")]
    NotOnZeroSet(f64),
    #[error("eigenvalue signature is not (+,+,-): {0:?}")]
    SignatureError(Vec<f64>),
    #[error("step too coarse: consecutive eigenvector overlap {0}")]
    StepTooCoarse(f64),
    #[error("no k <= {0} passes all checks")]
    KNotFound(u32),
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),
    #[error("degenerate curve: {0}")]
    Degenerate(String),
    #[error("ambiguous branch matching at path parameter {0}; refine step")]
    RefineStep(f64),
    #[error("move rejected at step {step}: {violation}")]
    MoveRejected { step: usize, violation: String },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
