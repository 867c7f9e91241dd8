//! Shared inputs for the benchmarks.

use std::path::PathBuf;

use effbasis_core::hamiltonian::{jordan_wigner, load_fcidump};
use effbasis_core::QubitHamiltonian;
use nalgebra::DMatrix;

/// Encoded Hamiltonian of a shipped fixture, e.g. `"h6_linear_r1.5"`.
pub fn fixture(name: &str) -> QubitHamiltonian {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.fcidump"));
    jordan_wigner(&load_fcidump(path).expect("fixture")).expect("encoding")
}

/// Deterministic dense symmetric test matrix.
pub fn symmetric_matrix(n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.5);
    (&a + a.transpose()) * 0.5 + DMatrix::from_diagonal_element(n, n, 1.0)
}
