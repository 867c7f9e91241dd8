use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("index {index} out of range (limit {limit}) at {context}")]
    IndexOutOfRange {
        index: usize,
        limit: usize,
        context: String,
    },

    #[error("missing header: {0}")]
    MissingHeader(String),

    #[error("invalid hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension cap exceeded: {dim} > {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("non-negligible imaginary part {0:e}")]
    ImaginaryPart(f64),

    #[error("matrix not symmetric: max deviation {0:e}")]
    NotSymmetric(f64),

    #[error("invalid overlap matrix: {0}")]
    InvalidOverlap(String),

    #[error("all overlap eigenvalues fell below threshold {threshold:e}")]
    RankZero { threshold: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("degenerate coefficient vector: c^T S c = {0:e}")]
    DegenerateCoefficients(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("reference state annihilated by the hamiltonian at basis vector {0}")]
    Annihilated(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
