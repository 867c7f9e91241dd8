use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense register state.
///
/// Amplitude index bit `q` is the occupation of qubit `q` (little-endian),
/// so qubit 0 is the least significant bit. Bitstrings are rendered the
/// other way around, qubit 0 first: index `0b0011` on four qubits prints as
/// `"1100"`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidCircuit(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidCircuit("non-finite amplitude".into()));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Parses a bitstring written qubit 0 first, e.g. `"1100"`.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let index = bitstring_index(bits)?;
        Ok(Self::basis(bits.len(), index))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other.dim())?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        n
    }

    pub fn scale(&mut self, s: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: Complex64, other: &StateVector) -> Result<()> {
        self.check_dim(other.dim())?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += s * b;
        }
        Ok(())
    }

    /// Largest imaginary component magnitude.
    pub fn max_imag(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

/// Renders basis index `index` on `n_qubits` qubits, qubit 0 first.
pub fn index_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`index_bitstring`].
pub fn bitstring_index(bits: &str) -> Result<usize> {
    let mut index = 0usize;
    for (q, c) in bits.chars().enumerate() {
        match c {
            '0' => {}
            '1' => index |= 1 << q,
            _ => return Err(Error::InvalidCircuit(format!("bad bitstring `{bits}`"))),
        }
    }
    Ok(index)
}
