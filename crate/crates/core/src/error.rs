use thiserror::Error;

/// Errors produced while building, parsing or simulating circuits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("parse error on line {line} near `{token}`: {message}")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
    #[error("cannot export `{0}` to OpenQASM")]
    UnsupportedExport(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("backend `{backend}` does not support `{kind}`")]
    UnsupportedOp { backend: String, kind: String },
    #[error("all candidate probabilities underflowed at op {op_index} (sum = {sum:e})")]
    NumericalUnderflow { op_index: usize, sum: f64 },
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
