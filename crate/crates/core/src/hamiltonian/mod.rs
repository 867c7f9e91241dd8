//! Fermionic and qubit Hamiltonians, integral ingestion, Jordan–Wigner
//! encoding and the exact-diagonalization oracle.

mod fci;
mod fermion;
mod jordan_wigner;
mod pauli;
mod qubit;

pub use fci::{
    exact_ground_state, exact_ground_state_in, lowest_determinant, sector_matrix, Sector,
    DEFAULT_MAX_QUBITS,
};
pub use fermion::{
    load_fcidump, load_hamiltonian, parse_fcidump, FermionHamiltonian, SYMMETRY_TOLERANCE,
};
pub use jordan_wigner::{
    encode_product, jordan_wigner, jordan_wigner_with_tolerance, ladder, spin_orbital,
    DEFAULT_DROP_TOLERANCE,
};
pub use pauli::{Pauli, PauliString, PauliSum, MAX_QUBITS};
pub use qubit::{apply_hamiltonian, QubitHamiltonian, SparseHamiltonian};
