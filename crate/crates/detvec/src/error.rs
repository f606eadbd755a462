//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("elements belong to different group specs ({0} vs {1})")]
    SpecMismatch(String, String),

    #[error("unsupported family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("membership residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    Membership { residual: f64, tol: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("parse error at offset {offset}: {msg}")]
    Parse { msg: String, offset: usize },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(String, String),

    #[error("evaluation outside declared domain at {point:?}: {msg}")]
    Domain { point: Vec<f64>, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("jet validation failed: {0}")]
    JetValidation(String),

    #[error("linear system too large: {size} unknowns exceeds guard {guard}")]
    SystemTooLarge { size: usize, guard: usize },

    #[error("rejection sampler exhausted after {attempts} attempts")]
    RejectionExhausted { attempts: usize },

    #[error("integrator step underflow at t={t}, |h|={h:.3e}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
