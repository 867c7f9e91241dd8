use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{index_bitstring, StateVector};
use crate::error::{Error, Result};
use crate::hamiltonian::{QubitHamiltonian, SparseHamiltonian};

/// Imaginary parts above this signal a gate-set violation for real circuits.
pub const IMAG_TOLERANCE: f64 = 1e-9;

/// Default cutoff for [`configuration_amplitudes`].
pub const DEFAULT_AMPLITUDE_THRESHOLD: f64 = 1e-6;

/// `Re <v|H|v>` for a normalized `v`.
pub fn expectation(qh: &QubitHamiltonian, v: &StateVector) -> Result<f64> {
    let hv = qh.apply(v)?;
    real_part(v.inner(&hv)?)
}

/// [`expectation`] with a precompiled operator.
pub fn expectation_sparse(h: &SparseHamiltonian, v: &StateVector) -> Result<f64> {
    let hv = h.apply(v)?;
    real_part(v.inner(&hv)?)
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOLERANCE * z.re.abs().max(1.0) {
        return Err(Error::ImaginaryPart(z.im));
    }
    Ok(z.re)
}

/// Real symmetric `H_ij = <ψi|H|ψj>` and `S_ij = <ψi|ψj>`.
pub fn transition_elements(
    qh: &QubitHamiltonian,
    states: &[StateVector],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    transition_elements_sparse(&qh.to_sparse(), states)
}

pub fn transition_elements_sparse(
    h: &SparseHamiltonian,
    states: &[StateVector],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (hc, sc) = transition_elements_complex_sparse(h, states)?;
    let max_im = hc
        .iter()
        .chain(sc.iter())
        .fold(0.0f64, |m, z| m.max(z.im.abs()));
    let scale = hc.iter().fold(1.0f64, |m, z| m.max(z.re.abs()));
    if max_im > IMAG_TOLERANCE * scale {
        return Err(Error::ImaginaryPart(max_im));
    }
    let hm = hc.map(|z| z.re);
    let sm = sc.map(|z| z.re);
    Ok((symmetrize(hm), symmetrize(sm)))
}

/// Hermitian `H_ij`, `S_ij` for complex basis states.
pub fn transition_elements_complex(
    qh: &QubitHamiltonian,
    states: &[StateVector],
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    transition_elements_complex_sparse(&qh.to_sparse(), states)
}

pub fn transition_elements_complex_sparse(
    h: &SparseHamiltonian,
    states: &[StateVector],
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = states.len();
    let dim = 1usize << h.n_qubits();
    for s in states {
        s.check_dim(dim)?;
    }
    let hstates: Vec<StateVector> = states.iter().map(|s| h.apply(s)).collect::<Result<_>>()?;
    let mut hm = DMatrix::zeros(n, n);
    let mut sm = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let hij = states[i].inner(&hstates[j])?;
            let sij = states[i].inner(&states[j])?;
            hm[(i, j)] = hij;
            sm[(i, j)] = sij;
            hm[(j, i)] = hij.conj();
            sm[(j, i)] = sij.conj();
        }
    }
    Ok((hm, sm))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// One computational-basis component of a state.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Configuration {
    pub index: usize,
    /// Qubit 0 first.
    pub bitstring: String,
    pub amplitude: Complex64,
}

/// Components with `|amplitude| >= threshold`, largest magnitude first
/// (ties by ascending index).
pub fn configuration_amplitudes(v: &StateVector, threshold: f64) -> Vec<Configuration> {
    let n = v.n_qubits();
    let mut out: Vec<Configuration> = v
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() >= threshold)
        .map(|(index, a)| Configuration {
            index,
            bitstring: index_bitstring(index, n),
            amplitude: *a,
        })
        .collect();
    out.sort_by(|a, b| {
        b.amplitude
            .norm()
            .total_cmp(&a.amplitude.norm())
            .then(a.index.cmp(&b.index))
    });
    out
}
