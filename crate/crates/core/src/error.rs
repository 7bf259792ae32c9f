use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("{backend} backend does not support the measure-and-reset channel")]
    UnsupportedChannel { backend: &'static str },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("circuit contains a measure-and-reset op and cannot be inverted")]
    NonInvertible,

    #[error("cannot compose circuits: {0}")]
    LayoutMismatch(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("brute-force enumeration refused for m = {m} items (limit {limit})")]
    EnumerationGuard { m: usize, limit: usize },

    #[error("objective returned non-finite value {value} at {point:?}")]
    NonFiniteObjective { value: f64, point: Vec<f64> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
