//! Ground-state solver for small fermionic Hamiltonians built on effective
//! many-body bases of graph-derived separable-pair circuits.

pub mod effective;
pub mod error;
pub mod graphs;
pub mod hamiltonian;
pub mod krylov;
pub mod optimize;
pub mod simulator;

pub use error::{Error, Result};

pub use effective::{GeneralizedEigResult, DEFAULT_THRESHOLD};
pub use graphs::{BasisSpec, MolecularGraph, Resources};
pub use hamiltonian::{FermionHamiltonian, PauliString, QubitHamiltonian, Sector};
pub use krylov::{KrylovConfig, KrylovMode};
pub use optimize::{GNMConfig, GNMResult};
pub use simulator::{Circuit, StateVector};

/// Complex scalar type used throughout.
pub use num_complex::Complex64;
