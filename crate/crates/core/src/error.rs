use thiserror::Error;

/// Errors raised by the simulator, estimator, optimizers and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit index {0} addressed more than once")]
    DuplicateQubit(usize),
    #[error("{kind} gate expects {expected} qubit(s), got {got}")]
    WrongQubitCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("rotation gate {0} requires an angle")]
    MissingAngle(&'static str),
    #[error("gate {0} does not take an angle")]
    UnexpectedAngle(&'static str),
    #[error("Pauli rotation requires an axis matching its qubit list")]
    MissingPauliAxis,
    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),
    #[error("channel of arity {arity} applied to {qubits} qubit(s)")]
    ArityMismatch { arity: usize, qubits: usize },
    #[error("channel is not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("channel arity must be 1 or 2, got {0}")]
    InvalidArity(usize),
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("probability {name} = {value} outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("time {name} = {value} must be strictly positive")]
    NonPositiveTime { name: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm deviation {0:e})")]
    NotNormalized(f64),
    #[error("system of {0} qubits is too large for dense diagonalization")]
    SystemTooLarge(usize),
    #[error("coefficient of term {0} is not finite")]
    NonFiniteCoefficient(String),
    #[error("{n_electrons} electrons do not fit into {n_qubits} qubits")]
    TooManyElectrons { n_electrons: usize, n_qubits: usize },
    #[error("ansatz {kind} is not supported on {n_qubits} qubits")]
    UnsupportedAnsatz { kind: String, n_qubits: usize },
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { expected: usize, got: usize },
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
    #[error("loss returned a non-finite value at evaluation {0}")]
    NonFiniteLoss(usize),
    #[error("non-finite gradient component {0}")]
    NonFiniteGradient(usize),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("kernel matrix is singular even after regularization")]
    SingularKernel,
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("curve fit did not converge within {0} iterations")]
    FitNotConverged(usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
