//! Krylov-type reference bases without Trotter error.
//!
//! Basis vector `j` uses reference `j mod R` and power / time step
//! `k = j div R`, so `N` vectors are spread round-robin over the `R`
//! references:
//!
//! * `POWER`:    `H^k |ref> / ‖H^k |ref>‖`
//! * `REALTIME`: `exp(-i k Δt H) |ref>`, evaluated by a Taylor series of the
//!   traceless part (terms are added until the increment norm drops below
//!   1e-12, with sub-steps keeping `‖H'‖ τ ≤ 1`) times the phase of the
//!   identity part.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::effective::{solve_generalized_hermitian, GeneralizedEigResult};
use crate::error::{Error, Result};
use crate::hamiltonian::{lowest_determinant, QubitHamiltonian, Sector, SparseHamiltonian};
use crate::simulator::{transition_elements_complex_sparse, StateVector};

/// Truncation threshold of the propagator series.
pub const TAYLOR_TOLERANCE: f64 = 1e-12;

/// Default real-time step (atomic time units).
pub const DEFAULT_TIME_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KrylovMode {
    Power,
    Realtime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrylovConfig {
    pub mode: KrylovMode,
    pub n: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub n_electrons: usize,
    #[serde(default)]
    pub ms2: i32,
    /// Computational-basis indices of the references. Empty selects the
    /// lowest-energy determinant of the sector.
    #[serde(default)]
    pub references: Vec<usize>,
}

fn default_dt() -> f64 {
    DEFAULT_TIME_STEP
}

impl KrylovConfig {
    pub fn new(mode: KrylovMode, n: usize, n_electrons: usize) -> Self {
        Self {
            mode,
            n,
            dt: DEFAULT_TIME_STEP,
            n_electrons,
            ms2: 0,
            references: Vec::new(),
        }
    }

    pub fn sector(&self) -> Sector {
        Sector::new(self.n_electrons, self.ms2)
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig(
                "Krylov basis size must be at least 1".into(),
            ));
        }
        if self.mode == KrylovMode::Realtime && !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        let sector = self.sector();
        for &r in &self.references {
            if r >= 1 << n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    limit: 1 << n_qubits,
                    context: "Krylov reference".into(),
                });
            }
            if !sector.contains(r) {
                return Err(Error::InvalidConfig(format!(
                    "reference {r} lies outside sector {sector:?}"
                )));
            }
        }
        Ok(())
    }

    /// References in use (the lowest determinant when none are given).
    pub fn resolved_references(&self, qh: &QubitHamiltonian) -> Result<Vec<usize>> {
        if self.references.is_empty() {
            Ok(vec![lowest_determinant(qh, self.sector())?.0])
        } else {
            Ok(self.references.clone())
        }
    }
}

pub fn krylov_basis(qh: &QubitHamiltonian, cfg: &KrylovConfig) -> Result<Vec<StateVector>> {
    let n_qubits = qh.n_qubits();
    cfg.validate(n_qubits)?;
    let refs = cfg.resolved_references(qh)?;
    let h = qh.to_sparse();
    let mut current: Vec<StateVector> = refs
        .iter()
        .map(|&r| StateVector::basis(n_qubits, r))
        .collect();
    let mut out = Vec::with_capacity(cfg.n);
    let mut step = 0;
    while out.len() < cfg.n {
        for (i, v) in current.iter_mut().enumerate() {
            if out.len() == cfg.n {
                break;
            }
            if step > 0 {
                *v = match cfg.mode {
                    KrylovMode::Power => {
                        let mut w = h.apply(v)?;
                        if w.normalize() == 0.0 {
                            return Err(Error::Annihilated(refs[i]));
                        }
                        w
                    }
                    KrylovMode::Realtime => propagate(qh, &h, v, cfg.dt)?,
                };
            }
            out.push(v.clone());
        }
        step += 1;
    }
    Ok(out)
}

/// `exp(-i t H) |v>`.
pub fn propagate(
    qh: &QubitHamiltonian,
    h: &SparseHamiltonian,
    v: &StateVector,
    t: f64,
) -> Result<StateVector> {
    let shift = qh.identity_coefficient();
    let bound = qh.traceless_one_norm();
    let substeps = (bound * t.abs()).ceil().max(1.0) as usize;
    let tau = t / substeps as f64;
    let dim = v.dim();
    let mut state = v.amplitudes().to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    let minus_i_tau = Complex64::new(0.0, -tau);
    for _ in 0..substeps {
        term.copy_from_slice(&state);
        for j in 1.. {
            // next = (-iτ)/j (H - shift) term
            h.apply_into(&term, &mut next);
            let f = minus_i_tau / j as f64;
            let mut norm2 = 0.0;
            for (n, t) in next.iter_mut().zip(&term) {
                *n = f * (*n - shift * t);
                norm2 += n.norm_sqr();
            }
            std::mem::swap(&mut term, &mut next);
            for (s, t) in state.iter_mut().zip(&term) {
                *s += t;
            }
            if norm2.sqrt() < TAYLOR_TOLERANCE {
                break;
            }
            if j > 200 {
                return Err(Error::NoConvergence { sweeps: j });
            }
        }
    }
    let phase = Complex64::new(0.0, -shift * t).exp();
    state.iter_mut().for_each(|a| *a *= phase);
    StateVector::from_amplitudes(state)
}

/// Ground value of the generalized eigenproblem over [`krylov_basis`].
pub fn krylov_energy(
    qh: &QubitHamiltonian,
    cfg: &KrylovConfig,
    threshold: f64,
) -> Result<GeneralizedEigResult<Complex64>> {
    let basis = krylov_basis(qh, cfg)?;
    let (h, s) = transition_elements_complex_sparse(&qh.to_sparse(), &basis)?;
    solve_generalized_hermitian(&h, &s, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{exact_ground_state, jordan_wigner, FermionHamiltonian, PauliString};
    use crate::DEFAULT_THRESHOLD;

    fn two_level() -> QubitHamiltonian {
        let mut fh = FermionHamiltonian::zeros(2, 2, 0.3);
        fh.set_h(0, 0, -1.2);
        fh.set_h(1, 1, -0.4);
        fh.set_g(0, 0, 0, 0, 0.65);
        fh.set_g(1, 1, 1, 1, 0.7);
        fh.set_g(0, 0, 1, 1, 0.6);
        fh.set_g(0, 1, 0, 1, 0.18);
        jordan_wigner(&fh).unwrap()
    }

    #[test]
    fn single_qubit_propagation_matches_closed_form() {
        let (a, bx, bz) = (0.2, 0.4, 0.7);
        let qh = QubitHamiltonian::new(
            1,
            vec![
                (a, PauliString::IDENTITY),
                (bx, "X0".parse().unwrap()),
                (bz, "Z0".parse().unwrap()),
            ],
        )
        .unwrap();
        let t = 3.7;
        let out = propagate(&qh, &qh.to_sparse(), &StateVector::basis(1, 0), t).unwrap();
        // exp(-itH)|0> = e^{-ita} (cos(bt)|0> - i sin(bt)(n_z|0> + n_x|1>))
        let b = (bx * bx + bz * bz).sqrt();
        let phase = Complex64::new(0.0, -a * t).exp();
        let i = Complex64::new(0.0, 1.0);
        let expect = [
            phase * (Complex64::from((b * t).cos()) - i * (b * t).sin() * bz / b),
            phase * (-i * (b * t).sin() * bx / b),
        ];
        for (x, y) in out.amplitudes().iter().zip(expect) {
            assert!((x - y).norm() < 1e-11, "{x} vs {y}");
        }
    }

    #[test]
    fn power_basis_is_round_robin() {
        let qh = two_level();
        let refs = vec![0b0011, 0b1100];
        let cfg = KrylovConfig {
            references: refs.clone(),
            ..KrylovConfig::new(KrylovMode::Power, 3, 2)
        };
        let basis = krylov_basis(&qh, &cfg).unwrap();
        assert_eq!(basis.len(), 3);
        assert_eq!(basis[0], StateVector::basis(4, refs[0]));
        assert_eq!(basis[1], StateVector::basis(4, refs[1]));
        let mut hv = qh.apply(&basis[0]).unwrap();
        hv.normalize();
        for (x, y) in basis[2].amplitudes().iter().zip(hv.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn realtime_spans_the_reachable_space() {
        let qh = two_level();
        let (fci, _) = exact_ground_state(&qh, 2).unwrap();
        let one = krylov_energy(
            &qh,
            &KrylovConfig::new(KrylovMode::Realtime, 1, 2),
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        let (lowest, e) = lowest_determinant(&qh, Sector::singlet(2)).unwrap();
        assert_eq!(lowest, 0b0011);
        assert!((one.ground_energy - e).abs() < 1e-12);
        let two = krylov_energy(
            &qh,
            &KrylovConfig::new(KrylovMode::Realtime, 2, 2),
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        assert!((two.ground_energy - fci).abs() < 1e-9);
        assert!(one.ground_energy > two.ground_energy);
    }

    #[test]
    fn validation() {
        assert!(KrylovConfig::new(KrylovMode::Power, 0, 2)
            .validate(4)
            .is_err());
        let bad_dt = KrylovConfig {
            dt: -1.0,
            ..KrylovConfig::new(KrylovMode::Realtime, 2, 2)
        };
        assert!(bad_dt.validate(4).is_err());
        let outside = KrylovConfig {
            references: vec![0b0001],
            ..KrylovConfig::new(KrylovMode::Power, 2, 2)
        };
        assert!(outside.validate(4).is_err());
        let too_big = KrylovConfig {
            references: vec![1 << 5],
            ..KrylovConfig::new(KrylovMode::Power, 2, 2)
        };
        assert!(matches!(
            too_big.validate(4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
