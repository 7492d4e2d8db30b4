//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    QasmSyntax { line: usize, col: usize, msg: String },

    #[error("unsupported gate `{name}` at line {line}")]
    UnsupportedGate { name: String, line: usize },

    #[error("qubit index {index} out of range for {n_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid partition boundaries: {0}")]
    InvalidPartition(String),

    #[error("memory capacity exceeded: {0}")]
    Capacity(String),

    #[error("noise model field `{field}`: {msg}")]
    NoiseSchema { field: String, msg: String },

    #[error("distribution width mismatch: {left} vs {right} qubits")]
    WidthMismatch { left: usize, right: usize },

    #[error("normalized fidelity undefined: ideal distribution is uniform")]
    DegenerateIdeal,

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: capacity failures are distinguished
    /// from configuration and parse failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity(_) => 3,
            _ => 2,
        }
    }
}
