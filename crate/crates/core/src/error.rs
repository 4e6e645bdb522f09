use thiserror::Error;

pub type Result<T> = std::result::Result<T, WayError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WayError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("outcome sets do not match: {0}")]
    OutcomeMismatch(String),

    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("budget {budget} is infeasible for a reference space of dimension {dim}")]
    InfeasibleBudget { budget: usize, dim: usize },

    #[error("invalid lambda quantization: {0}")]
    InvalidQuantization(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unknown model family `{0}`")]
    UnknownFamily(String),

    #[error("total dimension {dim} exceeds the configured maximum {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("{0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}
