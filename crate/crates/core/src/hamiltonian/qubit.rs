use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{PauliString, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::simulator::StateVector;

/// Real-weighted sum of Pauli strings; Hermitian by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl QubitHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::DimensionCap {
                dim: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        for (c, p) in &terms {
            if p.min_qubits() > n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: p.min_qubits() - 1,
                    limit: n_qubits,
                    context: format!("term {p}"),
                });
            }
            if !c.is_finite() {
                return Err(Error::InvalidHamiltonian(format!(
                    "non-finite coefficient on {p}"
                )));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    /// `c * I`
    pub fn identity(n_qubits: usize, c: f64) -> Self {
        Self {
            n_qubits,
            terms: vec![(c, PauliString::IDENTITY)],
        }
    }

    /// JW total particle number `Σ_q (I - Z_q) / 2`.
    pub fn number_operator(n_qubits: usize) -> Self {
        let mut terms = vec![(n_qubits as f64 / 2.0, PauliString::IDENTITY)];
        for q in 0..n_qubits {
            terms.push((-0.5, PauliString::single(q, super::pauli::Pauli::Z)));
        }
        Self { n_qubits, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(_, p)| p.is_identity())
            .map(|(c, _)| c)
            .sum()
    }

    /// `Σ |c|` over non-identity terms; bounds the spectral radius of the
    /// traceless part.
    pub fn traceless_one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(_, p)| !p.is_identity())
            .map(|(c, _)| c.abs())
            .sum()
    }

    /// Hamiltonian with the identity part removed.
    pub fn traceless(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, p)| !p.is_identity())
                .copied()
                .collect(),
        }
    }

    /// `H|v>` evaluated term by term.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let dim = 1usize << self.n_qubits;
        v.check_dim(dim)?;
        let amps = v.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (c, p) in &self.terms {
            let x = p.x_mask() as usize;
            let z = p.z_mask() as usize;
            let base = Complex64::new(*c, 0.0) * p.phase_on(0);
            for (b, a) in amps.iter().enumerate() {
                let ph = if (b & z).count_ones().is_multiple_of(2) {
                    base
                } else {
                    -base
                };
                out[b ^ x] += ph * a;
            }
        }
        StateVector::from_amplitudes(out)
    }

    /// Compiles to a row-compressed sparse matrix for repeated application.
    pub fn to_sparse(&self) -> SparseHamiltonian {
        SparseHamiltonian::build(self)
    }
}

/// Free-function form of [`QubitHamiltonian::apply`].
pub fn apply_hamiltonian(qh: &QubitHamiltonian, v: &StateVector) -> Result<StateVector> {
    qh.apply(v)
}

/// CSR form of a [`QubitHamiltonian`] in the computational basis.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    n_qubits: usize,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
}

impl SparseHamiltonian {
    fn build(qh: &QubitHamiltonian) -> Self {
        let n = qh.n_qubits;
        let dim = 1usize << n;
        // Group strings by their bit-flip pattern; each group is one
        // off-diagonal band of the matrix.
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for (c, p) in &qh.terms {
            groups
                .entry(p.x_mask())
                .or_default()
                .push((p.z_mask(), Complex64::new(*c, 0.0) * p.phase_on(0)));
        }
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for row in 0..dim as u64 {
            for (x, members) in &groups {
                let col = row ^ x;
                let mut v = Complex64::new(0.0, 0.0);
                for (z, c) in members {
                    if (col & z).count_ones() % 2 == 0 {
                        v += c;
                    } else {
                        v -= c;
                    }
                }
                if v.norm_sqr() > 1e-30 {
                    cols.push(col as u32);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            n_qubits: n,
            row_start,
            cols,
            vals,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        v.check_dim(1 << self.n_qubits)?;
        let mut out = vec![Complex64::new(0.0, 0.0); v.dim()];
        self.apply_into(v.amplitudes(), &mut out);
        StateVector::from_amplitudes(out)
    }

    /// `out = H v` on raw amplitude slices of matching length.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_start[row]..self.row_start[row + 1] {
                acc += self.vals[k] * v[self.cols[k] as usize];
            }
            *o = acc;
        }
    }

    /// Matrix element `<row|H|col>`.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        (self.row_start[row]..self.row_start[row + 1])
            .find(|&k| self.cols[k] as usize == col)
            .map(|k| self.vals[k])
            .unwrap_or_default()
    }

    /// Nonzero `(col, value)` entries of a row.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_start[row]..self.row_start[row + 1])
            .map(|k| (self.cols[k] as usize, self.vals[k]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scales() {
        let qh = QubitHamiltonian::identity(2, 2.0);
        let v = StateVector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let out = qh.apply(&v).unwrap();
        for a in out.amplitudes() {
            assert_eq!(*a, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn z_flips_sign_of_occupied() {
        let qh = QubitHamiltonian::new(2, vec![(1.0, "Z0".parse().unwrap())]).unwrap();
        let v = StateVector::from_bitstring("10").unwrap();
        let out = qh.apply(&v).unwrap();
        assert_eq!(out.amplitudes()[1], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let qh = QubitHamiltonian::identity(3, 1.0);
        assert!(matches!(
            qh.apply(&StateVector::zero(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_out_of_range_terms() {
        assert!(QubitHamiltonian::new(2, vec![(1.0, "X3".parse().unwrap())]).is_err());
    }

    #[test]
    fn sparse_matches_term_by_term() {
        let qh = QubitHamiltonian::new(
            3,
            vec![
                (0.3, "X0 Y1".parse().unwrap()),
                (-0.7, "Z2".parse().unwrap()),
                (0.2, "Y0 Y2".parse().unwrap()),
                (1.1, PauliString::IDENTITY),
            ],
        )
        .unwrap();
        let v = StateVector::from_amplitudes(
            (0..8)
                .map(|i| Complex64::new(i as f64 * 0.1, 0.3 - i as f64 * 0.05))
                .collect(),
        )
        .unwrap();
        let a = qh.apply(&v).unwrap();
        let b = qh.to_sparse().apply(&v).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
