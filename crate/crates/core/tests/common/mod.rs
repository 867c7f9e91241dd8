//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use effbasis_core::hamiltonian::{jordan_wigner, load_fcidump};
use effbasis_core::{Complex64, FermionHamiltonian, PauliString, QubitHamiltonian};
use nalgebra::DMatrix;
use serde::Deserialize;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.fcidump"))
}

pub fn fermion(name: &str) -> FermionHamiltonian {
    load_fcidump(fixture_path(name)).unwrap()
}

pub fn qubit(name: &str) -> QubitHamiltonian {
    jordan_wigner(&fermion(name)).unwrap()
}

#[derive(Debug, Deserialize)]
pub struct Reference {
    pub fci_energy: f64,
    pub n_electrons: usize,
    pub n_spatial: usize,
}

pub fn references() -> BTreeMap<String, Reference> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/reference.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// `a_j |b>` on occupation bitstrings, Jordan–Wigner sign included.
pub fn annihilate(b: usize, j: usize) -> Option<(f64, usize)> {
    if b >> j & 1 == 0 {
        return None;
    }
    let sign = if (b & ((1 << j) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((sign, b ^ (1 << j)))
}

pub fn create(b: usize, j: usize) -> Option<(f64, usize)> {
    if b >> j & 1 == 1 {
        return None;
    }
    let sign = if (b & ((1 << j) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((sign, b | (1 << j)))
}

/// Applies `ops[0] · ops[1] · …` (rightmost first) to `|b>`.
pub fn apply_string(b: usize, ops: &[(usize, bool)]) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    let mut b = b;
    for &(j, dag) in ops.iter().rev() {
        let (s, nb) = if dag {
            create(b, j)?
        } else {
            annihilate(b, j)?
        };
        sign *= s;
        b = nb;
    }
    Some((sign, b))
}

/// Second-quantized Hamiltonian on the listed determinants, built directly
/// from the integrals (chemists' notation, interleaved spins).
pub fn fermion_matrix(fh: &FermionHamiltonian, dets: &[usize]) -> DMatrix<f64> {
    let n = fh.n_spatial();
    let pos: BTreeMap<usize, usize> = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut m = DMatrix::zeros(dets.len(), dets.len());
    for (col, &d) in dets.iter().enumerate() {
        m[(col, col)] += fh.constant();
        let mut add = |ops: &[(usize, bool)], v: f64| {
            if v == 0.0 {
                return;
            }
            if let Some((s, out)) = apply_string(d, ops) {
                if let Some(&row) = pos.get(&out) {
                    m[(row, col)] += s * v;
                }
            }
        };
        for p in 0..n {
            for q in 0..n {
                for s in 0..2 {
                    add(&[(2 * p + s, true), (2 * q + s, false)], fh.h(p, q));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for t in 0..n {
                        let g = 0.5 * fh.g(p, q, r, t);
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                add(
                                    &[
                                        (2 * p + s1, true),
                                        (2 * r + s2, true),
                                        (2 * t + s2, false),
                                        (2 * q + s1, false),
                                    ],
                                    g,
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

/// Determinants with `n_up` spin-up and `n_down` spin-down electrons.
pub fn determinants(n_spatial: usize, n_up: usize, n_down: usize) -> Vec<usize> {
    (0usize..1 << (2 * n_spatial))
        .filter(|b| {
            let up = (0..n_spatial).filter(|p| b >> (2 * p) & 1 == 1).count();
            let down = (0..n_spatial).filter(|p| b >> (2 * p + 1) & 1 == 1).count();
            up == n_up && down == n_down
        })
        .collect()
}

/// Dense matrix of a qubit Hamiltonian via Kronecker products
/// (qubit `q` is bit `q` of the basis index).
pub fn kron_matrix(qh: &QubitHamiltonian) -> DMatrix<Complex64> {
    let n = qh.n_qubits();
    let dim = 1 << n;
    let mut out = DMatrix::zeros(dim, dim);
    for &(c, p) in qh.terms() {
        out += pauli_matrix(&p, n) * Complex64::new(c, 0.0);
    }
    out
}

pub fn pauli_matrix(p: &PauliString, n_qubits: usize) -> DMatrix<Complex64> {
    use effbasis_core::hamiltonian::Pauli;
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut m = DMatrix::from_element(1, 1, o);
    for q in (0..n_qubits).rev() {
        let f = match p.get(q) {
            None => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            Some(Pauli::X) => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Some(Pauli::Y) => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            Some(Pauli::Z) => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        };
        m = m.kronecker(&f);
    }
    m
}

/// Dense real generator `Σσ (a†_qσ a_pσ - a†_pσ a_qσ)` on `n_qubits`.
pub fn rotation_generator(p: usize, q: usize, n_qubits: usize) -> DMatrix<f64> {
    let dim = 1 << n_qubits;
    let mut k = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        for s in 0..2 {
            let (i, j) = (2 * p + s, 2 * q + s);
            if let Some((sg, out)) = apply_string(b, &[(j, true), (i, false)]) {
                k[(out, b)] += sg;
            }
            if let Some((sg, out)) = apply_string(b, &[(i, true), (j, false)]) {
                k[(out, b)] -= sg;
            }
        }
    }
    k
}
