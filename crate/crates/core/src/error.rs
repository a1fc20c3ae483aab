use thiserror::Error;

/// Errors raised anywhere in the simulator and cost model.
#[derive(Debug, Error)]
pub enum Error {
    /// A dense amplitude vector would exceed the configured qubit cap.
    #[error("{qubits} qubits exceeds the amplitude-vector cap of {cap} qubits")]
    Capacity { qubits: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Distillation inputs share (numerically) no Fourier support.
    #[error("degenerate distillation input: success probability {0:e}")]
    DegenerateInput(f64),

    #[error("postselected branch has zero probability (qubit {qubit} = {bit})")]
    ZeroProbabilityBranch { qubit: usize, bit: bool },

    #[error("circuit parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
