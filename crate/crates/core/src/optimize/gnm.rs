//! Pre-optimization of single circuits and the concerted `G(N, M)` solve.

use serde::{Deserialize, Serialize};

use super::bfgs::{minimize, BfgsOptions};
use super::objective::{basis_sector, RayleighObjective, SectorOperator, DEFAULT_FD_STEP};
use super::saddle::{escape_step, lowest_curvature, CURVATURE_TOLERANCE};
use crate::effective::{solve_matrices, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::graphs::{build_basis, BasisSpec, MolecularGraph};
use crate::hamiltonian::{QubitHamiltonian, Sector};
use crate::simulator::{Circuit, ParameterBinding};

/// Coefficient magnitude below which a converged optimized circuit counts as
/// decoupled from the total wavefunction.
pub const DECOUPLED_TOLERANCE: f64 = 1e-6;

/// Settings of a `G(N, M)` solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GNMConfig {
    pub n: usize,
    pub m: usize,
    pub augmented: bool,
    /// Max-abs gradient tolerance of the concerted optimization.
    pub gtol: f64,
    /// Max-abs gradient tolerance of single-circuit pre-optimization.
    pub pre_gtol: f64,
    /// BFGS iteration cap per invocation.
    pub max_iterations: usize,
    pub max_restarts: usize,
    /// Cap on negative-curvature restarts after gradient convergence.
    pub max_saddle_escapes: usize,
    pub fd_step: f64,
    /// S-norm distance between optimized and eigenproblem coefficients
    /// above which the optimization restarts.
    pub disagreement_tolerance: f64,
    pub overlap_threshold: f64,
    /// Curvature constant of the strong-Wolfe line search.
    pub wolfe_c2: f64,
    /// Pre-optimize every circuit before the concerted step. When false the
    /// angles stored in the basis circuits are used as they are.
    pub pre_optimize: bool,
}

impl Default for GNMConfig {
    fn default() -> Self {
        Self {
            n: 1,
            m: 0,
            augmented: false,
            gtol: 1e-6,
            pre_gtol: 1e-6,
            max_iterations: 200,
            max_restarts: 5,
            max_saddle_escapes: 5,
            fd_step: DEFAULT_FD_STEP,
            disagreement_tolerance: 1e-6,
            overlap_threshold: DEFAULT_THRESHOLD,
            wolfe_c2: 0.1,
            pre_optimize: true,
        }
    }
}

impl GNMConfig {
    pub fn new(n: usize, m: usize, augmented: bool) -> Self {
        Self {
            n,
            m,
            augmented,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if self.m > self.n {
            return Err(Error::InvalidConfig(format!(
                "M = {} exceeds N = {}",
                self.m, self.n
            )));
        }
        for (name, v) in [
            ("gtol", self.gtol),
            ("pre_gtol", self.pre_gtol),
            ("fd_step", self.fd_step),
            ("disagreement_tolerance", self.disagreement_tolerance),
            ("overlap_threshold", self.overlap_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.wolfe_c2 > 1e-4 && self.wolfe_c2 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "wolfe_c2 must lie in (1e-4, 1), got {}",
                self.wolfe_c2
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn bfgs(&self, gtol: f64) -> BfgsOptions {
        BfgsOptions {
            gtol,
            max_iterations: self.max_iterations,
            c2: self.wolfe_c2,
            ..BfgsOptions::default()
        }
    }
}

/// Outcome of pre-optimizing one circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreOptimized {
    pub binding: ParameterBinding,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `<ψ(θ)|H|ψ(θ)>` from `init` with the default tolerances.
/// The sector is read off the circuit's state at `init`.
pub fn pre_optimize(
    circuit: &Circuit,
    qh: &QubitHamiltonian,
    init: &ParameterBinding,
) -> Result<PreOptimized> {
    let values = circuit.resolve(init)?;
    let state = circuit.run(&values);
    let dominant = (0..state.dim())
        .max_by(|&a, &b| {
            state.amplitudes()[a]
                .norm()
                .total_cmp(&state.amplitudes()[b].norm())
        })
        .unwrap_or(0);
    let up = (0..circuit.n_qubits())
        .step_by(2)
        .filter(|q| dominant >> q & 1 == 1)
        .count();
    let down = (1..circuit.n_qubits())
        .step_by(2)
        .filter(|q| dominant >> q & 1 == 1)
        .count();
    let sector = Sector::new(up + down, up as i32 - down as i32);
    let op = SectorOperator::new(qh, sector)?;
    let cfg = GNMConfig::default();
    pre_optimize_in(circuit, &op, &values, &cfg)
}

/// [`pre_optimize`] on a prepared sector operator, starting from `values`.
pub fn pre_optimize_in(
    circuit: &Circuit,
    op: &SectorOperator,
    values: &[f64],
    cfg: &GNMConfig,
) -> Result<PreOptimized> {
    let circuits = std::slice::from_ref(circuit);
    let mut obj = RayleighObjective::new(circuits, op, vec![values.to_vec()], 1, cfg.fd_step)?;
    let x0 = obj.pack(&[1.0]);
    // The single coefficient is fixed; only angles are optimized.
    let report = minimize(
        |a: &[f64]| {
            let mut x = Vec::with_capacity(a.len() + 1);
            x.push(1.0);
            x.extend_from_slice(a);
            let (v, g) = obj.evaluate(&x)?;
            Ok((v, g[1..].to_vec()))
        },
        &x0[1..],
        &cfg.bfgs(cfg.pre_gtol),
    )?;
    if !report.converged {
        log::warn!(
            "pre-optimization stopped after {} iterations with gradient {:e}",
            report.iterations,
            report.gradient_norm
        );
    }
    Ok(PreOptimized {
        binding: circuit.bind(&report.x),
        energy: report.value,
        iterations: report.iterations,
        converged: report.converged,
    })
}

/// Graph circuits pre-optimized from zero angles and sorted by ascending
/// energy (ties, within 1e-9 Ha, keep the input order).
#[derive(Debug, Clone, Serialize)]
pub struct PreparedBasis {
    pub basis: BasisSpec,
    pub energies: Vec<f64>,
    pub iterations: Vec<usize>,
}

pub fn prepare_basis(
    graphs: &[MolecularGraph],
    qh: &QubitHamiltonian,
    augmented: bool,
    cfg: &GNMConfig,
) -> Result<PreparedBasis> {
    let raw = build_basis(graphs, augmented)?;
    let op = SectorOperator::new(qh, basis_sector(&raw)?)?;
    prepare_basis_in(raw, &op, cfg)
}

pub fn prepare_basis_in(
    raw: BasisSpec,
    op: &SectorOperator,
    cfg: &GNMConfig,
) -> Result<PreparedBasis> {
    let pinned = pre_optimize_basis_in(raw, op, cfg)?;
    let mut order: Vec<usize> = (0..pinned.energies.len()).collect();
    order.sort_by_key(|&k| (pinned.energies[k] / 1e-9).round() as i64);
    Ok(pinned.reordered(&order))
}

/// Pre-optimizes every circuit from zero angles, keeping the given order.
pub fn pre_optimize_basis_in(
    raw: BasisSpec,
    op: &SectorOperator,
    cfg: &GNMConfig,
) -> Result<PreparedBasis> {
    let mut basis = raw;
    let mut energies = Vec::with_capacity(basis.len());
    let mut iterations = Vec::with_capacity(basis.len());
    for c in &mut basis.circuits {
        let zeros = vec![0.0; c.n_parameters()];
        let pre = pre_optimize_in(c, op, &zeros, cfg)?;
        let values = c.resolve(&pre.binding)?;
        c.set_values(&values)?;
        energies.push(pre.energy);
        iterations.push(pre.iterations);
    }
    Ok(PreparedBasis {
        basis,
        energies,
        iterations,
    })
}

impl PreparedBasis {
    fn reordered(&self, order: &[usize]) -> PreparedBasis {
        PreparedBasis {
            basis: BasisSpec {
                graphs: order
                    .iter()
                    .map(|&k| self.basis.graphs[k].clone())
                    .collect(),
                circuits: order
                    .iter()
                    .map(|&k| self.basis.circuits[k].clone())
                    .collect(),
                augmented: self.basis.augmented,
            },
            energies: order.iter().map(|&k| self.energies[k]).collect(),
            iterations: order.iter().map(|&k| self.iterations[k]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GNMResult {
    pub n: usize,
    pub m: usize,
    pub augmented: bool,
    /// Ground value of the generalized eigenproblem at the final angles.
    pub energy: f64,
    /// Its eigenvector, `cᵀSc = 1`, largest entry positive.
    pub coefficients: Vec<f64>,
    /// Final angles, one binding per circuit.
    pub angles: Vec<ParameterBinding>,
    /// Single-circuit energies at the starting angles.
    pub pre_energies: Vec<f64>,
    /// Concerted BFGS iterations, summed over restarts.
    pub iterations: usize,
    /// Largest iteration count of a single BFGS invocation (including
    /// pre-optimization).
    pub max_solve_iterations: usize,
    pub restarts: usize,
    /// Restarts from stationary points that are not minima: steps along a
    /// negative-curvature direction plus restarts of decoupled circuits.
    pub saddle_escapes: usize,
    /// Optimized circuits restarted from zero angles after converging with a
    /// vanishing coefficient.
    pub reseeded: Vec<usize>,
    /// Objective value after every accepted BFGS step.
    pub history: Vec<f64>,
    pub converged: bool,
    pub restart_limit_reached: bool,
    pub retained_rank: usize,
    pub condition_number: f64,
    pub discarded_overlap_eigenvalues: Vec<f64>,
}

impl GNMResult {
    /// Copy of `basis` with this result's angles stored in the circuits.
    pub fn apply_to(&self, basis: &BasisSpec) -> Result<BasisSpec> {
        let mut out = basis.clone();
        for (c, b) in out.circuits.iter_mut().zip(&self.angles) {
            let v = c.resolve(b)?;
            c.set_values(&v)?;
        }
        Ok(out)
    }
}

/// Solves `G(N, M)` on `basis` (whose first `N` circuits are used).
pub fn gnm_solve(basis: &BasisSpec, qh: &QubitHamiltonian, cfg: &GNMConfig) -> Result<GNMResult> {
    let op = SectorOperator::new(qh, basis_sector(basis)?)?;
    gnm_solve_in(basis, &op, cfg)
}

pub fn gnm_solve_in(basis: &BasisSpec, op: &SectorOperator, cfg: &GNMConfig) -> Result<GNMResult> {
    cfg.validate()?;
    if basis.len() < cfg.n {
        return Err(Error::InvalidConfig(format!(
            "basis has {} circuits, N = {} requested",
            basis.len(),
            cfg.n
        )));
    }
    if basis.augmented != cfg.augmented {
        return Err(Error::InvalidConfig(format!(
            "config augmented = {} but basis augmented = {}",
            cfg.augmented, basis.augmented
        )));
    }
    let circuits = &basis.circuits[..cfg.n];

    let mut angles = Vec::with_capacity(cfg.n);
    let mut pre_energies = Vec::with_capacity(cfg.n);
    let mut max_solve_iterations = 0;
    for c in circuits {
        if cfg.pre_optimize {
            let pre = pre_optimize_in(c, op, &c.values(), cfg)?;
            max_solve_iterations = max_solve_iterations.max(pre.iterations);
            pre_energies.push(pre.energy);
            angles.push(c.resolve(&pre.binding)?);
        } else {
            let v = c.values();
            pre_energies.push(op.expectation(&op.gather(&c.run(&v))?));
            angles.push(v);
        }
    }

    let mut obj = RayleighObjective::new(circuits, op, angles, cfg.m, cfg.fd_step)?;
    let (h, s) = obj.matrices();
    let mut eig = solve_matrices(h, s, cfg.overlap_threshold)?;
    let mut iterations = 0;
    let mut restarts = 0;
    let mut saddle_escapes = 0;
    let mut reseeded = Vec::new();
    let mut history = Vec::new();
    let mut converged = true;
    let mut restart_limit_reached = false;

    if cfg.m > 0 {
        let opts = cfg.bfgs(cfg.gtol);
        let mut x0 = obj.pack(&eig.coefficients);
        let mut accepted;
        loop {
            let report = minimize(|x: &[f64]| obj.evaluate(x), &x0, &opts)?;
            obj.evaluate(&report.x)?;
            accepted = report.x.clone();
            iterations += report.iterations;
            max_solve_iterations = max_solve_iterations.max(report.iterations);
            history.extend_from_slice(&report.history);
            converged = report.converged;

            let (h, s) = obj.matrices();
            eig = solve_matrices(h, s, cfg.overlap_threshold)?;
            let distance = coefficient_distance(&report.x[..cfg.n], &eig.coefficients, s);
            log::debug!(
                "G({},{}) pass {}: {} iterations, E = {:.12}, coefficient distance {distance:e}",
                cfg.n,
                cfg.m,
                restarts + saddle_escapes,
                report.iterations,
                eig.ground_energy
            );
            if distance > cfg.disagreement_tolerance {
                if restarts == cfg.max_restarts {
                    restart_limit_reached = true;
                    log::warn!(
                        "G({},{}) hit the restart limit ({})",
                        cfg.n,
                        cfg.m,
                        cfg.max_restarts
                    );
                    break;
                }
                restarts += 1;
                x0 = obj.pack(&eig.coefficients);
                continue;
            }
            if saddle_escapes == cfg.max_saddle_escapes {
                break;
            }
            // Converged in the gradient sense; check that this is a minimum.
            let x = obj.pack(&eig.coefficients);
            let mut f = |y: &[f64]| obj.evaluate(y);
            let curvature = lowest_curvature(&mut f, &x)?;
            if curvature.value < -CURVATURE_TOLERANCE {
                if let Some(y) = escape_step(&mut f, &x, eig.ground_energy, &curvature.direction)? {
                    log::debug!(
                        "G({},{}): leaving saddle at E = {:.12} (curvature {:.3e})",
                        cfg.n,
                        cfg.m,
                        eig.ground_energy,
                        curvature.value
                    );
                    saddle_escapes += 1;
                    x0 = y;
                    continue;
                }
            }
            // The angle gradient of a circuit is proportional to its
            // coefficient, so a circuit that converged with a vanishing
            // coefficient cannot move. Restart it once from zero angles; the
            // energy cannot rise since the other circuits are unchanged.
            obj.evaluate(&accepted)?;
            let stalled: Vec<usize> = (0..cfg.m)
                .filter(|&k| {
                    eig.coefficients[k].abs() < DECOUPLED_TOLERANCE && !reseeded.contains(&k)
                })
                .collect();
            if stalled.is_empty() {
                break;
            }
            for &k in &stalled {
                log::debug!(
                    "G({},{}): restarting decoupled circuit {k} from zero angles",
                    cfg.n,
                    cfg.m
                );
                obj.set_angles(k, &vec![0.0; circuits[k].n_parameters()])?;
            }
            reseeded.extend(stalled);
            let (h, s) = obj.matrices();
            eig = solve_matrices(h, s, cfg.overlap_threshold)?;
            saddle_escapes += 1;
            x0 = obj.pack(&eig.coefficients);
        }
        // Curvature probes move the cached angles; restore the accepted point.
        obj.evaluate(&accepted)?;
    }

    Ok(GNMResult {
        n: cfg.n,
        m: cfg.m,
        augmented: cfg.augmented,
        energy: eig.ground_energy,
        coefficients: eig.coefficients,
        angles: circuits
            .iter()
            .zip(obj.angles())
            .map(|(c, a)| c.bind(a))
            .collect(),
        pre_energies,
        iterations,
        max_solve_iterations,
        restarts,
        saddle_escapes,
        reseeded,
        history,
        converged,
        restart_limit_reached,
        retained_rank: eig.retained_rank,
        condition_number: eig.condition_number,
        discarded_overlap_eigenvalues: eig.discarded_overlap_eigenvalues,
    })
}

/// `‖a/‖a‖_S − b‖_S` after aligning the sign of `a` with `b` (`b` is assumed
/// S-normalized).
fn coefficient_distance(a: &[f64], b: &[f64], s: &nalgebra::DMatrix<f64>) -> f64 {
    let a = nalgebra::DVector::from_column_slice(a);
    let b = nalgebra::DVector::from_column_slice(b);
    let na = a.dot(&(s * &a)).max(0.0).sqrt();
    if na == 0.0 {
        return f64::INFINITY;
    }
    let mut a = a / na;
    if a.dot(&(s * &b)) < 0.0 {
        a = -a;
    }
    let d = &a - &b;
    d.dot(&(s * &d)).max(0.0).sqrt()
}
