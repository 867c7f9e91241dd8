//! Exact diagonalization in a fixed particle-number / spin-projection sector.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::qubit::QubitHamiltonian;
use crate::effective::symmetric_eigen;
use crate::error::{Error, Result};
use crate::simulator::StateVector;

/// Default qubit cap for the exact oracle.
pub const DEFAULT_MAX_QUBITS: usize = 16;

/// Electron count and twice the spin projection (`n_up - n_down`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    pub n_electrons: usize,
    pub ms2: i32,
}

impl Sector {
    pub fn new(n_electrons: usize, ms2: i32) -> Self {
        Self { n_electrons, ms2 }
    }

    /// Closed-shell default `S_z = 0`.
    pub fn singlet(n_electrons: usize) -> Self {
        Self {
            n_electrons,
            ms2: 0,
        }
    }

    /// Up/down electron counts, if the sector is realizable.
    pub fn spin_counts(&self) -> Option<(usize, usize)> {
        let n = self.n_electrons as i64;
        let up2 = n + self.ms2 as i64;
        if up2 < 0 || up2 % 2 != 0 || up2 > 2 * n {
            return None;
        }
        Some(((up2 / 2) as usize, (n - up2 / 2) as usize))
    }

    /// Whether basis state `b` (interleaved spin orbitals) lies in the sector.
    pub fn contains(&self, b: usize) -> bool {
        let up = (b & EVEN_MASK).count_ones() as usize;
        let down = (b & ODD_MASK).count_ones() as usize;
        self.spin_counts() == Some((up, down))
    }

    /// All basis indices of the sector on `n_qubits`, ascending.
    pub fn basis(&self, n_qubits: usize) -> Vec<usize> {
        (0..1usize << n_qubits)
            .filter(|&b| self.contains(b))
            .collect()
    }
}

const EVEN_MASK: usize = 0x5555_5555_5555_5555;
const ODD_MASK: usize = 0xAAAA_AAAA_AAAA_AAAA;

/// Dense sector block of `qh` together with the sector's basis indices.
pub fn sector_matrix(qh: &QubitHamiltonian, sector: Sector) -> Result<(DMatrix<f64>, Vec<usize>)> {
    let n = qh.n_qubits();
    let basis = sector.basis(n);
    let mut position = vec![usize::MAX; 1 << n];
    for (i, &b) in basis.iter().enumerate() {
        position[b] = i;
    }
    let d = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (col, &b) in basis.iter().enumerate() {
        for (c, p) in qh.terms() {
            let row_state = b ^ p.x_mask() as usize;
            let row = position[row_state];
            if row == usize::MAX {
                continue;
            }
            m[(row, col)] += p.phase_on(b as u64) * *c;
        }
    }
    let max_im = m.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    if max_im > 1e-10 {
        return Err(Error::ImaginaryPart(max_im));
    }
    Ok((m.map(|v| v.re), basis))
}

/// Lowest eigenpair of `qh` restricted to `n_electrons` with `S_z = 0`.
pub fn exact_ground_state(qh: &QubitHamiltonian, n_electrons: usize) -> Result<(f64, StateVector)> {
    exact_ground_state_in(qh, Sector::singlet(n_electrons), DEFAULT_MAX_QUBITS)
}

pub fn exact_ground_state_in(
    qh: &QubitHamiltonian,
    sector: Sector,
    max_qubits: usize,
) -> Result<(f64, StateVector)> {
    let n = qh.n_qubits();
    if n > max_qubits {
        return Err(Error::DimensionCap {
            dim: n,
            cap: max_qubits,
        });
    }
    if sector.spin_counts().is_none() {
        return Err(Error::InvalidConfig(format!(
            "unrealizable sector {sector:?}"
        )));
    }
    let (m, basis) = sector_matrix(qh, sector)?;
    if basis.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "sector {sector:?} is empty on {n} qubits"
        )));
    }
    let eig = symmetric_eigen(&m)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let v = eig.eigenvectors.column(0);
    // Largest-magnitude amplitude positive.
    let pivot = v
        .iter()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
    let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
    for (i, &b) in basis.iter().enumerate() {
        amps[b] = Complex64::new(sign * v[i], 0.0);
    }
    let mut state = StateVector::from_amplitudes(amps)?;
    state.normalize();
    Ok((eig.eigenvalues[0], state))
}

/// Lowest diagonal element of the sector, i.e. the best single determinant
/// in the given orbital basis. Ties go to the lowest index.
pub fn lowest_determinant(qh: &QubitHamiltonian, sector: Sector) -> Result<(usize, f64)> {
    let basis = sector.basis(qh.n_qubits());
    let mut best: Option<(usize, f64)> = None;
    for b in basis {
        let e: f64 = qh
            .terms()
            .iter()
            .filter(|(_, p)| p.x_mask() == 0)
            .map(|(c, p)| c * p.phase_on(b as u64).re)
            .sum();
        if best.is_none_or(|(_, eb)| e < eb - 1e-12) {
            best = Some((b, e));
        }
    }
    best.ok_or_else(|| Error::InvalidConfig(format!("sector {sector:?} is empty")))
}
