//! Compiles fermionic position-space lattice Hamiltonians — Gray-code
//! Laplacians, ordering penalties, entanglement gadgets, and diagonal
//! potentials — into explicit weighted Pauli term lists, and verifies them at
//! desk scale against an independent brute-force oracle on the antisymmetric
//! basis.

pub mod emit;
pub mod encoding;
pub mod gadgets;
pub mod laplacian;
pub mod oracle;
pub mod pauli;
pub mod potential;
pub mod problem;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("qubit {0} is not registered in the layout")]
    UnregisteredQubit(usize),
    #[error("matrix realization needs {qubits} qubits, cap is {cap}")]
    DimensionCap { qubits: usize, cap: usize },
    #[error("expansion reached {terms} terms, cap is {cap}")]
    TermCap { terms: usize, cap: usize },
    #[error("operator has imaginary matrix entries up to {0:e}")]
    NotReal(f64),
    #[error("emitted operator is not hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("term list parse error at line {line}: {message}")]
    TermListParse { line: usize, message: String },
    #[error("basis size {size} exceeds cap {cap}")]
    BasisCap { size: usize, cap: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
