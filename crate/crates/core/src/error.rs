use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("{what}: expected length {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability {probability:e} of the observed class is too small for a log-gradient")]
    VanishingProbability { probability: f64 },

    #[error("all Fisher traces are zero; the model carries no information")]
    DegenerateFisher,

    #[error("kappa = {kappa} must exceed 1 (gamma = {gamma}, n = {n})")]
    KappaTooSmall { kappa: f64, gamma: f64, n: u64 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("individual {index} has not been evaluated")]
    Unevaluated { index: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
