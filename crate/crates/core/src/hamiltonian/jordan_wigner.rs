//! Jordan–Wigner encoding with interleaved spin orbitals: spatial orbital
//! `p` maps to qubit `2p` (spin up) and `2p + 1` (spin down).

use num_complex::Complex64;

use super::fermion::FermionHamiltonian;
use super::pauli::{PauliString, PauliSum};
use super::qubit::QubitHamiltonian;
use crate::error::{Error, Result};

/// Terms with smaller magnitude are dropped after encoding (Hartree).
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;

/// Qubit carrying spatial orbital `p` with spin `spin` (0 = up, 1 = down).
#[inline]
pub fn spin_orbital(p: usize, spin: usize) -> usize {
    2 * p + spin
}

/// `a†_j` (`creation = true`) or `a_j` as a Pauli sum:
/// `½ (X_j ∓ i Y_j) Z_{j-1} … Z_0`.
pub fn ladder(j: usize, creation: bool) -> PauliSum {
    let chain = (1u64 << j) - 1;
    let bit = 1u64 << j;
    let x = PauliString::from_masks(bit, chain);
    let y = PauliString::from_masks(bit, chain | bit);
    let sign = if creation { -1.0 } else { 1.0 };
    let mut s = PauliSum::new();
    s.add(x, Complex64::new(0.5, 0.0));
    s.add(y, Complex64::new(0.0, 0.5 * sign));
    s
}

/// Encodes the operator product `ops[0] · ops[1] · …`, each op being
/// `(spin_orbital, is_creation)`.
pub fn encode_product(ops: &[(usize, bool)]) -> PauliSum {
    let mut acc = PauliSum::new();
    acc.add(PauliString::IDENTITY, Complex64::new(1.0, 0.0));
    for &(j, dag) in ops {
        acc = acc.mul(&ladder(j, dag));
    }
    acc
}

pub fn jordan_wigner(fh: &FermionHamiltonian) -> Result<QubitHamiltonian> {
    jordan_wigner_with_tolerance(fh, DEFAULT_DROP_TOLERANCE)
}

pub fn jordan_wigner_with_tolerance(
    fh: &FermionHamiltonian,
    drop_tolerance: f64,
) -> Result<QubitHamiltonian> {
    fh.validate()?;
    let n = fh.n_spatial();
    let n_qubits = 2 * n;
    let one = Complex64::new(1.0, 0.0);

    let mut sum = PauliSum::new();
    sum.add(PauliString::IDENTITY, one * fh.constant());

    // Cache ladder operators; they are reused many times below.
    let create: Vec<PauliSum> = (0..n_qubits).map(|j| ladder(j, true)).collect();
    let annihilate: Vec<PauliSum> = (0..n_qubits).map(|j| ladder(j, false)).collect();

    for p in 0..n {
        for q in 0..n {
            let hpq = fh.h(p, q);
            if hpq == 0.0 {
                continue;
            }
            for s in 0..2 {
                let i = spin_orbital(p, s);
                let j = spin_orbital(q, s);
                let term = create[i].mul(&annihilate[j]);
                sum.add_sum(&term, one * hpq);
            }
        }
    }

    // ½ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = fh.g(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let i = spin_orbital(p, sigma);
                            let k = spin_orbital(r, tau);
                            let l = spin_orbital(s, tau);
                            let j = spin_orbital(q, sigma);
                            if i == k || l == j {
                                continue;
                            }
                            let left = create[i].mul(&create[k]);
                            let right = annihilate[l].mul(&annihilate[j]);
                            sum.add_sum(&left.mul(&right), one * (0.5 * v));
                        }
                    }
                }
            }
        }
    }

    let mut terms = Vec::with_capacity(sum.len());
    for (p, c) in sum.terms() {
        if c.im.abs() > 1e-10 {
            return Err(Error::ImaginaryPart(c.im));
        }
        if c.re.abs() >= drop_tolerance {
            terms.push((c.re, *p));
        }
    }
    terms.sort_by_key(|a| a.1);
    if terms.is_empty() {
        terms.push((0.0, PauliString::IDENTITY));
    }
    QubitHamiltonian::new(n_qubits, terms)
}
