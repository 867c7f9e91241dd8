//! Rayleigh quotient of a linear combination of circuit states.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graphs::BasisSpec;
use crate::hamiltonian::{QubitHamiltonian, Sector};
use crate::simulator::{Circuit, StateVector, IMAG_TOLERANCE};

/// Denominators `cᵀSc` below this are rejected as degenerate.
pub const MIN_NORM: f64 = 1e-12;

/// Default central finite-difference step for circuit angles (rad).
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Amplitude outside the sector above this means the state left it.
const LEAKAGE_TOLERANCE: f64 = 1e-10;

/// A real Hamiltonian restricted to one particle-number / spin sector.
///
/// All graph circuits conserve both quantities, so every matrix element
/// needed by the optimizer lives in this (much smaller) block.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    n_qubits: usize,
    indices: Vec<usize>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SectorOperator {
    pub fn new(qh: &QubitHamiltonian, sector: Sector) -> Result<Self> {
        let n = qh.n_qubits();
        let indices = sector.basis(n);
        if indices.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "sector {sector:?} is empty on {n} qubits"
            )));
        }
        let mut position = vec![u32::MAX; 1 << n];
        for (i, &b) in indices.iter().enumerate() {
            position[b] = i as u32;
        }
        let sparse = qh.to_sparse();
        let mut row_start = Vec::with_capacity(indices.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for &row in &indices {
            for (col, v) in sparse.row(row) {
                if v.im.abs() > IMAG_TOLERANCE {
                    return Err(Error::ImaginaryPart(v.im));
                }
                if position[col] == u32::MAX {
                    if v.norm() > 1e-12 {
                        return Err(Error::InvalidHamiltonian(format!(
                            "Hamiltonian couples the sector to basis state {col}"
                        )));
                    }
                    continue;
                }
                cols.push(position[col]);
                vals.push(v.re);
            }
            row_start.push(cols.len());
        }
        Ok(Self {
            n_qubits: n,
            indices,
            row_start,
            cols,
            vals,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Full-space indices of the sector basis, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[k] * v[self.cols[k] as usize];
            }
            *o = acc;
        }
    }

    /// Sector components of a real full-space state.
    pub fn gather(&self, s: &StateVector) -> Result<Vec<f64>> {
        s.check_dim(1 << self.n_qubits)?;
        let amps = s.amplitudes();
        let out: Vec<f64> = self.indices.iter().map(|&i| amps[i].re).collect();
        let imag = s.max_imag();
        if imag > IMAG_TOLERANCE {
            return Err(Error::ImaginaryPart(imag));
        }
        let inside: f64 = out.iter().map(|x| x * x).sum();
        let leak = (s.norm().powi(2) - inside).max(0.0).sqrt();
        if leak > LEAKAGE_TOLERANCE {
            return Err(Error::InvalidCircuit(format!(
                "state leaves the particle sector (norm {leak:e} outside)"
            )));
        }
        Ok(out)
    }

    /// Embeds sector components back into the full space.
    pub fn scatter(&self, v: &[f64]) -> StateVector {
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for (&i, &x) in self.indices.iter().zip(v) {
            amps[i].re = x;
        }
        StateVector::from_amplitudes(amps).expect("power-of-two dimension")
    }

    pub fn expectation(&self, v: &[f64]) -> f64 {
        let mut hv = vec![0.0; v.len()];
        self.apply(v, &mut hv);
        dot(v, &hv)
    }
}

/// Sector of the states prepared by a graph basis (`2|E|` electrons, `S_z = 0`).
pub fn basis_sector(basis: &BasisSpec) -> Result<Sector> {
    let g = basis
        .graphs
        .first()
        .ok_or_else(|| Error::InvalidGraph("empty basis".into()))?;
    Ok(Sector::singlet(g.n_electrons()))
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `f(c, θ) = cᵀH(θ)c / cᵀS(θ)c` over `N` circuits, with the angles of the
/// first `M` circuits as free variables.
///
/// The variable vector is `[c_0 … c_{N-1}, θ_0 …, θ_{M-1} …]`, each circuit's
/// angles in its parameter-table order. States, `Hψ` and the matrices are
/// cached, so changing one circuit's angles recomputes only that circuit.
pub struct RayleighObjective<'a> {
    circuits: &'a [Circuit],
    op: &'a SectorOperator,
    m: usize,
    fd_step: f64,
    angles: Vec<Vec<f64>>,
    states: Vec<Vec<f64>>,
    hstates: Vec<Vec<f64>>,
    h: DMatrix<f64>,
    s: DMatrix<f64>,
}

impl<'a> RayleighObjective<'a> {
    pub fn new(
        circuits: &'a [Circuit],
        op: &'a SectorOperator,
        angles: Vec<Vec<f64>>,
        m: usize,
        fd_step: f64,
    ) -> Result<Self> {
        let n = circuits.len();
        if n == 0 {
            return Err(Error::InvalidConfig("empty basis".into()));
        }
        if m > n {
            return Err(Error::InvalidConfig(format!("M = {m} exceeds N = {n}")));
        }
        if fd_step.is_nan() || fd_step <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "finite-difference step {fd_step} must be positive"
            )));
        }
        if angles.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: angles.len(),
            });
        }
        for (c, a) in circuits.iter().zip(&angles) {
            if c.n_qubits() != op.n_qubits() {
                return Err(Error::DimensionMismatch {
                    expected: op.n_qubits(),
                    got: c.n_qubits(),
                });
            }
            if a.len() != c.n_parameters() {
                return Err(Error::DimensionMismatch {
                    expected: c.n_parameters(),
                    got: a.len(),
                });
            }
        }
        let mut obj = Self {
            circuits,
            op,
            m,
            fd_step,
            angles: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            hstates: Vec::with_capacity(n),
            h: DMatrix::zeros(n, n),
            s: DMatrix::zeros(n, n),
        };
        for (k, a) in angles.into_iter().enumerate() {
            let psi = op.gather(&circuits[k].run(&a))?;
            let mut hpsi = vec![0.0; psi.len()];
            op.apply(&psi, &mut hpsi);
            obj.angles.push(a);
            obj.states.push(psi);
            obj.hstates.push(hpsi);
        }
        for i in 0..n {
            obj.refresh_row(i);
        }
        Ok(obj)
    }

    pub fn n_circuits(&self) -> usize {
        self.circuits.len()
    }

    pub fn n_optimized(&self) -> usize {
        self.m
    }

    pub fn n_variables(&self) -> usize {
        self.n_circuits()
            + self.circuits[..self.m]
                .iter()
                .map(|c| c.n_parameters())
                .sum::<usize>()
    }

    pub fn angles(&self) -> &[Vec<f64>] {
        &self.angles
    }

    pub fn matrices(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.h, &self.s)
    }

    /// Sector components of circuit `k`'s current state.
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    /// Variable vector for coefficients `c` and the current angles.
    pub fn pack(&self, c: &[f64]) -> Vec<f64> {
        let mut x = c.to_vec();
        for a in &self.angles[..self.m] {
            x.extend_from_slice(a);
        }
        x
    }

    pub fn set_angles(&mut self, k: usize, values: &[f64]) -> Result<()> {
        if values.len() != self.circuits[k].n_parameters() {
            return Err(Error::DimensionMismatch {
                expected: self.circuits[k].n_parameters(),
                got: values.len(),
            });
        }
        if self.angles[k] == values {
            return Ok(());
        }
        let psi = self.op.gather(&self.circuits[k].run(values))?;
        self.op.apply(&psi, &mut self.hstates[k]);
        self.states[k] = psi;
        self.angles[k] = values.to_vec();
        self.refresh_row(k);
        Ok(())
    }

    fn refresh_row(&mut self, k: usize) {
        for l in 0..self.n_circuits() {
            let s = dot(&self.states[k], &self.states[l]);
            // Average both orders so H stays exactly symmetric.
            let h = 0.5
                * (dot(&self.states[k], &self.hstates[l]) + dot(&self.hstates[k], &self.states[l]));
            self.s[(k, l)] = s;
            self.s[(l, k)] = s;
            self.h[(k, l)] = h;
            self.h[(l, k)] = h;
        }
    }

    /// `cᵀHc / cᵀSc` at the current angles.
    pub fn quotient(&self, c: &[f64]) -> Result<f64> {
        let c = DVector::from_column_slice(c);
        let norm = c.dot(&(&self.s * &c));
        if norm < MIN_NORM {
            return Err(Error::DegenerateCoefficients(norm));
        }
        Ok(c.dot(&(&self.h * &c)) / norm)
    }

    /// Value and gradient at `x`; updates the cached angles to `x`.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let n = self.n_circuits();
        if x.len() != self.n_variables() {
            return Err(Error::DimensionMismatch {
                expected: self.n_variables(),
                got: x.len(),
            });
        }
        let mut offset = n;
        for k in 0..self.m {
            let p = self.circuits[k].n_parameters();
            self.set_angles(k, &x[offset..offset + p])?;
            offset += p;
        }
        let c = DVector::from_column_slice(&x[..n]);
        let hc = &self.h * &c;
        let sc = &self.s * &c;
        let norm = c.dot(&sc);
        if norm < MIN_NORM {
            return Err(Error::DegenerateCoefficients(norm));
        }
        let value = c.dot(&hc) / norm;
        let mut grad: Vec<f64> = ((&hc - &sc * value) * (2.0 / norm))
            .iter()
            .copied()
            .collect();
        for k in 0..self.m {
            grad.extend(self.angle_gradient(k, c.as_slice(), &hc, &sc)?);
        }
        Ok((value, grad))
    }

    /// Central differences of the quotient in circuit `k`'s angles. Only row
    /// and column `k` of `H` and `S` change, so each displaced point costs one
    /// partial circuit run and one sector `H` application.
    #[allow(clippy::needless_range_loop)]
    fn angle_gradient(
        &self,
        k: usize,
        c: &[f64],
        hc: &DVector<f64>,
        sc: &DVector<f64>,
    ) -> Result<Vec<f64>> {
        let circuit = &self.circuits[k];
        let ck = c[k];
        // Parts of cᵀHc and cᵀSc that do not involve circuit k.
        let num_rest = c.iter().zip(hc.iter()).map(|(a, b)| a * b).sum::<f64>() - 2.0 * ck * hc[k]
            + ck * ck * self.h[(k, k)];
        let den_rest = c.iter().zip(sc.iter()).map(|(a, b)| a * b).sum::<f64>() - 2.0 * ck * sc[k]
            + ck * ck * self.s[(k, k)];

        let mut order: Vec<(usize, usize)> = (0..circuit.n_parameters())
            .filter_map(|slot| circuit.first_use(slot).map(|g| (g, slot)))
            .collect();
        order.sort_unstable();

        let mut grad = vec![0.0; circuit.n_parameters()];
        let mut values = self.angles[k].clone();
        let mut prefix = StateVector::zero(circuit.n_qubits());
        let mut pos = 0;
        let end = circuit.gates().len();
        let mut hpsi = vec![0.0; self.op.dim()];
        for (gate, slot) in order {
            circuit.apply_range(&mut prefix, &values, pos, gate);
            pos = gate;
            let mut f = [0.0; 2];
            for (i, sign) in [1.0, -1.0].into_iter().enumerate() {
                values[slot] = self.angles[k][slot] + sign * self.fd_step;
                let mut v = prefix.clone();
                circuit.apply_range(&mut v, &values, gate, end);
                let psi = self.op.gather(&v)?;
                self.op.apply(&psi, &mut hpsi);
                let mut cross_h = 0.0;
                let mut cross_s = 0.0;
                for l in 0..self.n_circuits() {
                    if l != k {
                        cross_h += c[l] * dot(&psi, &self.hstates[l]);
                        cross_s += c[l] * dot(&psi, &self.states[l]);
                    }
                }
                let num = num_rest + 2.0 * ck * cross_h + ck * ck * dot(&psi, &hpsi);
                let den = den_rest + 2.0 * ck * cross_s + ck * ck * dot(&psi, &psi);
                if den < MIN_NORM {
                    return Err(Error::DegenerateCoefficients(den));
                }
                f[i] = num / den;
            }
            values[slot] = self.angles[k][slot];
            grad[slot] = (f[0] - f[1]) / (2.0 * self.fd_step);
        }
        Ok(grad)
    }
}

/// One-shot evaluation of the quotient and its gradient over `c` and the
/// angles of the first `m` circuits, with angles taken from `angles`
/// (one vector per circuit, parameter-table order).
pub fn rayleigh_objective(
    basis: &BasisSpec,
    qh: &QubitHamiltonian,
    c: &[f64],
    angles: &[Vec<f64>],
    m: usize,
) -> Result<(f64, Vec<f64>)> {
    let op = SectorOperator::new(qh, basis_sector(basis)?)?;
    let mut obj =
        RayleighObjective::new(&basis.circuits, &op, angles.to_vec(), m, DEFAULT_FD_STEP)?;
    if c.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: c.len(),
        });
    }
    let x = obj.pack(c);
    obj.evaluate(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_basis, enumerate_graphs};
    use crate::hamiltonian::{jordan_wigner, load_fcidump};

    fn h4() -> QubitHamiltonian {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/h4_square_d1.5.fcidump"
        );
        jordan_wigner(&load_fcidump(path).unwrap()).unwrap()
    }

    fn setup(augmented: bool) -> (BasisSpec, SectorOperator) {
        let qh = h4();
        let basis = build_basis(&enumerate_graphs(4, 4).unwrap(), augmented).unwrap();
        let op = SectorOperator::new(&qh, basis_sector(&basis).unwrap()).unwrap();
        (basis, op)
    }

    fn angles(basis: &BasisSpec, shift: f64) -> Vec<Vec<f64>> {
        basis
            .circuits
            .iter()
            .enumerate()
            .map(|(k, c)| {
                (0..c.n_parameters())
                    .map(|j| shift + 0.1 * k as f64 - 0.07 * j as f64)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn sector_operator_matches_full_expectation() {
        let qh = h4();
        let (basis, op) = setup(false);
        let psi = basis.circuits[0].run(&angles(&basis, 0.3)[0]);
        let full = crate::simulator::expectation(&qh, &psi).unwrap();
        let v = op.gather(&psi).unwrap();
        assert!((op.expectation(&v) - full).abs() < 1e-12);
        let back = op.scatter(&v);
        assert!((back.inner(&psi).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gather_rejects_leakage() {
        let (_, op) = setup(false);
        // One electron only.
        let s = StateVector::basis(8, 1);
        assert!(matches!(op.gather(&s), Err(Error::InvalidCircuit(_))));
    }

    #[test]
    fn coefficient_gradient_matches_differences() {
        let (basis, op) = setup(false);
        let mut obj =
            RayleighObjective::new(&basis.circuits, &op, angles(&basis, 0.2), 0, 1e-4).unwrap();
        let c = [0.9, -0.3, 0.25];
        let (value, grad) = obj.evaluate(&c).unwrap();
        assert!((value - obj.quotient(&c).unwrap()).abs() < 1e-14);
        let h = 1e-6;
        for i in 0..3 {
            let mut p = c;
            let mut m = c;
            p[i] += h;
            m[i] -= h;
            let fd = (obj.quotient(&p).unwrap() - obj.quotient(&m).unwrap()) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-8, "{i}: {fd} vs {}", grad[i]);
        }
        // Scale invariance: the gradient is orthogonal to c.
        let radial: f64 = c.iter().zip(&grad).map(|(a, b)| a * b).sum();
        assert!(radial.abs() < 1e-12);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn angle_gradient_matches_five_point_stencil() {
        let (basis, op) = setup(true);
        let start = angles(&basis, -0.15);
        let mut obj = RayleighObjective::new(&basis.circuits, &op, start.clone(), 2, 1e-4).unwrap();
        let c = [0.8, 0.4, -0.2];
        let x = obj.pack(&c);
        let (_, grad) = obj.evaluate(&x).unwrap();

        let mut probe =
            RayleighObjective::new(&basis.circuits, &op, start.clone(), 0, 1e-4).unwrap();
        let mut offset = 3;
        for k in 0..2 {
            for j in 0..start[k].len() {
                let h = 1e-3;
                let mut f = |d: f64| {
                    let mut a = start[k].clone();
                    a[j] += d;
                    probe.set_angles(k, &a).unwrap();
                    probe.quotient(&c).unwrap()
                };
                let fd = (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
                probe.set_angles(k, &start[k]).unwrap();
                let g = grad[offset + j];
                assert!(
                    (fd - g).abs() < 1e-6 * (1.0 + g.abs()),
                    "{k}/{j}: {fd} vs {g}"
                );
            }
            offset += start[k].len();
        }
    }

    #[test]
    fn matrices_are_symmetric_with_unit_diagonal() {
        let (basis, op) = setup(true);
        let obj =
            RayleighObjective::new(&basis.circuits, &op, angles(&basis, 0.4), 3, 1e-4).unwrap();
        let (h, s) = obj.matrices();
        for i in 0..3 {
            assert!((s[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..3 {
                assert_eq!(h[(i, j)], h[(j, i)]);
                assert_eq!(s[(i, j)], s[(j, i)]);
            }
        }
    }

    #[test]
    fn zero_coefficients_are_degenerate() {
        let (basis, op) = setup(false);
        let mut obj =
            RayleighObjective::new(&basis.circuits, &op, angles(&basis, 0.0), 0, 1e-4).unwrap();
        assert!(matches!(
            obj.evaluate(&[0.0, 0.0, 0.0]),
            Err(Error::DegenerateCoefficients(_))
        ));
    }

    #[test]
    fn rejects_bad_shapes() {
        let (basis, op) = setup(false);
        assert!(
            RayleighObjective::new(&basis.circuits, &op, angles(&basis, 0.0), 4, 1e-4).is_err()
        );
        assert!(RayleighObjective::new(&basis.circuits, &op, angles(&basis, 0.0), 1, 0.0).is_err());
        assert!(RayleighObjective::new(&basis.circuits, &op, vec![vec![]], 0, 1e-4).is_err());
        let mut obj =
            RayleighObjective::new(&basis.circuits, &op, angles(&basis, 0.0), 1, 1e-4).unwrap();
        assert!(obj.evaluate(&[1.0, 0.0, 0.0]).is_err());
    }
}
