//! `H c = λ S c` over a non-orthogonal basis via canonical orthogonalization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::eigen::{asymmetry, symmetric_eigen};
use crate::error::{Error, Result};

/// Overlap eigenvalues below this are discarded by default.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

const SYMMETRY_TOLERANCE: f64 = 1e-10;
const PSD_TOLERANCE: f64 = 1e-10;

/// Where a basis state came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateLabel {
    pub graph: usize,
    pub parameters: Vec<f64>,
}

/// Hamiltonian and overlap matrices of an effective basis.
#[derive(Debug, Clone)]
pub struct EffectiveProblem {
    h: DMatrix<f64>,
    s: DMatrix<f64>,
    labels: Vec<StateLabel>,
}

impl EffectiveProblem {
    pub fn new(h: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        Self::with_labels(h, s, Vec::new())
    }

    pub fn with_labels(h: DMatrix<f64>, s: DMatrix<f64>, labels: Vec<StateLabel>) -> Result<Self> {
        let n = h.nrows();
        for m in [&h, &s] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.ncols(),
                });
            }
        }
        if !labels.is_empty() && labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        let scale = h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let dev = asymmetry(&h);
        if dev > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric(dev));
        }
        let dev = asymmetry(&s);
        if dev > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric(dev));
        }
        for i in 0..n {
            if (s[(i, i)] - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidOverlap(format!(
                    "S[{i}][{i}] = {} is not unit",
                    s[(i, i)]
                )));
            }
        }
        Ok(Self { h, s, labels })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedEigResult<T = f64> {
    pub ground_energy: f64,
    /// Normalized so that `c† S c = 1`; largest-magnitude entry real positive.
    pub coefficients: Vec<T>,
    pub retained_rank: usize,
    /// Overlap eigenvalues below the threshold, ascending.
    pub discarded_overlap_eigenvalues: Vec<f64>,
    /// Largest over smallest retained overlap eigenvalue.
    pub condition_number: f64,
}

/// Canonical orthogonalization: diagonalize `S`, drop eigenvalues below
/// `threshold`, diagonalize `H` in the retained basis and map back.
pub fn solve_generalized(prob: &EffectiveProblem, threshold: f64) -> Result<GeneralizedEigResult> {
    solve_matrices(&prob.h, &prob.s, threshold)
}

pub(crate) fn solve_matrices(
    h: &DMatrix<f64>,
    s: &DMatrix<f64>,
    threshold: f64,
) -> Result<GeneralizedEigResult> {
    let (energy, c, retained, discarded, cond) = canonical(h, s, threshold, 1)?;
    let mut c: Vec<f64> = c.iter().copied().collect();
    let pivot = c
        .iter()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
    if pivot < 0.0 {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(GeneralizedEigResult {
        ground_energy: energy,
        coefficients: c,
        retained_rank: retained,
        discarded_overlap_eigenvalues: discarded,
        condition_number: cond,
    })
}

/// Ground value, its coefficients, retained rank, discarded overlap
/// eigenvalues and condition number.
type Canonical = (f64, DVector<f64>, usize, Vec<f64>, f64);

/// Core routine shared by the real and Hermitian solvers. `multiplicity` is
/// 2 for the real embedding of a complex problem, where every eigenvalue is
/// doubled; ranks and discarded lists are reported per original dimension.
fn canonical(
    h: &DMatrix<f64>,
    s: &DMatrix<f64>,
    threshold: f64,
    multiplicity: usize,
) -> Result<Canonical> {
    let n = h.nrows();
    if n == 0 {
        return Err(Error::RankZero { threshold });
    }
    let se = symmetric_eigen(s)?;
    let min_eig = se.eigenvalues[0];
    if min_eig < -PSD_TOLERANCE {
        return Err(Error::InvalidOverlap(format!(
            "overlap matrix not positive semidefinite (eigenvalue {min_eig:e})"
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|&i| se.eigenvalues[i] >= threshold).collect();
    if keep.is_empty() {
        return Err(Error::RankZero { threshold });
    }
    let discarded: Vec<f64> = (0..n)
        .filter(|&i| se.eigenvalues[i] < threshold)
        .map(|i| se.eigenvalues[i])
        .step_by(multiplicity)
        .collect();
    let smax = se.eigenvalues[n - 1];
    let smin = se.eigenvalues[keep[0]];

    let mut x = DMatrix::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let scale = 1.0 / se.eigenvalues[i].sqrt();
        x.set_column(col, &(se.eigenvectors.column(i) * scale));
    }
    let hp = x.transpose() * h * &x;
    let hp = (&hp + hp.transpose()) * 0.5;
    let he = symmetric_eigen(&hp)?;
    let c = &x * he.eigenvectors.column(0);
    Ok((
        he.eigenvalues[0],
        c,
        keep.len() / multiplicity,
        discarded,
        smax / smin,
    ))
}

/// Hermitian generalization used for complex (real-time) bases. Solved
/// through the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
/// spectrum is the complex one with every eigenvalue doubled.
pub fn solve_generalized_hermitian(
    h: &DMatrix<Complex64>,
    s: &DMatrix<Complex64>,
    threshold: f64,
) -> Result<GeneralizedEigResult<Complex64>> {
    let n = h.nrows();
    for m in [h, s] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.ncols(),
            });
        }
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        let scale = m.iter().fold(1.0f64, |a, v| a.max(v.norm()));
        if dev > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric(dev));
        }
    }
    let (eh, es) = (embed(h), embed(s));
    let (energy, v, retained, discarded, cond) = canonical(&eh, &es, threshold, 2)?;
    let mut c: Vec<Complex64> = (0..n).map(|i| Complex64::new(v[i], v[n + i])).collect();
    // Fix the phase: largest entry real positive.
    let pivot = c.iter().copied().fold(Complex64::new(0.0, 0.0), |m, x| {
        if x.norm() > m.norm() {
            x
        } else {
            m
        }
    });
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        c.iter_mut().for_each(|x| *x *= phase);
    }
    // Renormalize c† S c = 1 (the embedding vector may mix a degenerate pair).
    let sc = s * DVector::from_column_slice(&c);
    let norm: f64 = c
        .iter()
        .zip(sc.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    if norm > 0.0 {
        let inv = 1.0 / norm.sqrt();
        c.iter_mut().for_each(|x| *x *= inv);
    }
    Ok(GeneralizedEigResult {
        ground_energy: energy,
        coefficients: c,
        retained_rank: retained,
        discarded_overlap_eigenvalues: discarded,
        condition_number: cond,
    })
}

fn embed(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(n + i, n + j)] = z.re;
            out[(i, n + j)] = -z.im;
            out[(n + i, j)] = z.im;
        }
    }
    // Hermitian input up to rounding; force exact symmetry.
    (&out + out.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_problem() {
        let h = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 2.0]);
        let p = EffectiveProblem::new(h, DMatrix::identity(2, 2)).unwrap();
        let r = solve_generalized(&p, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.ground_energy, -1.0);
        assert_eq!(r.coefficients, vec![1.0, 0.0]);
        assert_eq!(r.retained_rank, 2);
        assert_eq!(r.condition_number, 1.0);
    }

    #[test]
    fn exact_linear_dependence() {
        let h = DMatrix::from_row_slice(2, 2, &[0.3, 0.3, 0.3, 0.3]);
        let s = DMatrix::from_element(2, 2, 1.0);
        let p = EffectiveProblem::new(h, s).unwrap();
        let r = solve_generalized(&p, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.retained_rank, 1);
        assert_eq!(r.discarded_overlap_eigenvalues.len(), 1);
        assert!((r.ground_energy - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_and_bad_diagonal() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            EffectiveProblem::new(h, DMatrix::identity(2, 2)),
            Err(Error::NotSymmetric(_))
        ));
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(EffectiveProblem::new(DMatrix::zeros(2, 2), s).is_err());
    }

    #[test]
    fn rank_zero() {
        let h = DMatrix::from_element(1, 1, 1.0);
        let s = DMatrix::from_element(1, 1, 1.0);
        let p = EffectiveProblem::new(h, s).unwrap();
        assert!(matches!(
            solve_generalized(&p, 2.0),
            Err(Error::RankZero { .. })
        ));
    }

    #[test]
    fn coefficients_are_s_normalized() {
        let h = DMatrix::from_row_slice(2, 2, &[-1.0, -0.5, -0.5, -0.8]);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 1.0]);
        let r = solve_generalized(&EffectiveProblem::new(h, s.clone()).unwrap(), 1e-8).unwrap();
        let c = DVector::from_vec(r.coefficients.clone());
        assert!(((c.transpose() * &s * &c)[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_matches_real_for_real_input() {
        let h = DMatrix::from_row_slice(2, 2, &[-1.0, -0.5, -0.5, -0.8]);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 1.0]);
        let real = solve_matrices(&h, &s, 1e-8).unwrap();
        let cx = solve_generalized_hermitian(
            &h.map(|x| Complex64::new(x, 0.0)),
            &s.map(|x| Complex64::new(x, 0.0)),
            1e-8,
        )
        .unwrap();
        assert!((real.ground_energy - cx.ground_energy).abs() < 1e-12);
        assert_eq!(cx.retained_rank, 2);
        for (a, b) in real.coefficients.iter().zip(&cx.coefficients) {
            assert!((Complex64::new(*a, 0.0) - b).norm() < 1e-10);
        }
    }
}
