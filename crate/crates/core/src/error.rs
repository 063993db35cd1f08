use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("network parse error at line {line}: {message}")]
    NetworkParse { line: usize, message: String },

    #[error("dense engine is limited to {limit} qubits; requested {qubits}")]
    DenseLimitExceeded { qubits: usize, limit: usize },

    #[error("operator term cap of {cap} Pauli strings exceeded")]
    TermCapExceeded { cap: usize },

    #[error("minimum-path enumeration cap of {cap} paths exceeded")]
    PathCapExceeded { cap: usize },

    #[error("site cap of {cap} exceeded: {requested} sites requested")]
    SiteCapExceeded { cap: usize, requested: usize },

    #[error("qubits {from} and {to} are not connected: no leading order")]
    Unreachable { from: usize, to: usize },

    #[error("angle outside the fundamental wedge: {0}")]
    AngleOutsideWedge(String),

    #[error("threshold crossing times of sites {first} and {second} coincide")]
    DegenerateCrossing { first: usize, second: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
