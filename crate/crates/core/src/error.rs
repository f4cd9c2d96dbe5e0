use thiserror::Error;

/// Errors raised by the simulation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} appears more than once among targets and controls")]
    OverlappingQubits(usize),
    #[error("gate of arity {arity} applied to {targets} target qubits")]
    ArityMismatch { arity: usize, targets: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator on {n_qubits} qubits exceeds the dense limit of {limit}")]
    DimensionTooLarge { n_qubits: usize, limit: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("non-finite parameter for gate `{0}`")]
    NonFiniteParameter(String),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("selected measurement branch has zero probability")]
    ZeroProbabilityBranch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate ground space at s = {s} (gap {gap:.3e})")]
    Degenerate { s: f64, gap: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, QsimError>;
