use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid lattice spec: {0}")]
    InvalidLattice(String),

    #[error("invalid stabilizer state: {0}")]
    InvalidState(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("regions overlap: {0}")]
    Overlap(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("rule precondition failed: {0}")]
    RulePrecondition(String),

    #[error("graph is irreducible: {remaining_vertices} vertices and {remaining_edges} edges remain")]
    IrreducibleGraph {
        remaining_vertices: usize,
        remaining_edges: usize,
    },

    #[error("disconnected support: {0}")]
    Disconnected(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("too many qubits for dense simulation: {n} > {max}")]
    TooLarge { n: usize, max: usize },

    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
