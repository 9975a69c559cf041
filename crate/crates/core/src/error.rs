use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("missing field `{0}`")]
    MissingField(&'static str),

    #[error("invalid field `{field}`: {message}")]
    InvalidField { field: &'static str, message: String },

    #[error("imaginary coefficient {value:e} on {term} did not cancel")]
    ImaginaryResidue { term: String, value: f64 },

    #[error("qubit count mismatch: expected {expected}, got {actual}")]
    QubitMismatch { expected: usize, actual: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),

    #[error("odd number of spin orbitals ({0})")]
    OddOrbitalCount(usize),

    #[error("no product table covers irrep labels {0:?}")]
    UnknownIrreps(Vec<String>),

    #[error("empty sector: {n_electrons} electrons in {n_qubits} qubits")]
    EmptySector { n_qubits: usize, n_electrons: usize },

    #[error("empty candidate queue")]
    EmptyQueue,

    #[error("configuration error: {0}")]
    Config(String),
}
