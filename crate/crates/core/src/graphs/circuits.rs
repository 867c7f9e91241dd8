//! Separable-pair circuits for molecular graphs.
//!
//! An edge `(p, q)` acts on qubits `a = 2p, b = 2p+1, c = 2q, d = 2q+1`:
//!
//! ```text
//! X a; X b                       (preparation prefix, |1100>)
//! RY(θ) c; CNOT c→d; CNOT c→a; CNOT d→b
//! ```
//!
//! giving `cos(θ/2)|1100> + sin(θ/2)|0011>` (one spin-paired electron pair
//! shared by the two orbitals). The edge orbital rotation `U_R(φ)` is then
//! applied on top of it.
//!
//! `U_R(φ) = exp((φ/2) Σσ (a†_qσ a_pσ - a†_pσ a_qσ))` mixes the two spatial
//! orbitals as `p → cos(φ/2) p + sin(φ/2) q`. Its Jordan–Wigner image per
//! spin is two commuting Pauli strings (`X Z… Y` and `Y Z… X`), so it
//! compiles exactly into two `PAULI_ROT` gates per spin channel.

use num_complex::Complex64;
use serde::Serialize;

use super::graph::MolecularGraph;
use crate::error::{Error, Result};
use crate::hamiltonian::{encode_product, spin_orbital, PauliSum};
use crate::simulator::{Angle, Circuit, CircuitBuilder, Gate};

/// Appends the pair-preparation part `U(θ)` for `edge` using parameter `theta`.
pub fn pair_preparation(b: &mut CircuitBuilder, edge: (usize, usize), theta: &str) {
    let (p, q) = edge;
    let (a, bq) = (spin_orbital(p, 0), spin_orbital(p, 1));
    let (c, d) = (spin_orbital(q, 0), spin_orbital(q, 1));
    b.prepare(a).prepare(bq);
    b.gate(Gate::Ry {
        target: c,
        angle: Angle::named(theta, 1.0),
    })
    .gate(Gate::Cnot {
        control: c,
        target: d,
    })
    .gate(Gate::Cnot {
        control: c,
        target: a,
    })
    .gate(Gate::Cnot {
        control: d,
        target: bq,
    });
}

/// Appends `U_R(φ)` between spatial orbitals `p` and `q` using parameter `phi`.
pub fn orbital_rotation(b: &mut CircuitBuilder, p: usize, q: usize, phi: &str) -> Result<()> {
    for spin in 0..2 {
        let i = spin_orbital(p, spin);
        let j = spin_orbital(q, spin);
        // κ = a†_j a_i - a†_i a_j (anti-Hermitian): every coefficient is i·b.
        let mut kappa = PauliSum::new();
        kappa.add_sum(
            &encode_product(&[(j, true), (i, false)]),
            Complex64::new(1.0, 0.0),
        );
        kappa.add_sum(
            &encode_product(&[(i, true), (j, false)]),
            Complex64::new(-1.0, 0.0),
        );
        for (pauli, c) in kappa.terms() {
            if c.norm() < 1e-14 {
                continue;
            }
            if c.re.abs() > 1e-14 {
                return Err(Error::InvalidCircuit(
                    "orbital rotation generator not anti-Hermitian".into(),
                ));
            }
            // exp((φ/2) i b P) = exp(-i (φ/2) (-b) P)
            b.gate(Gate::PauliRot {
                pauli: *pauli,
                angle: Angle::named(phi, -c.im),
            });
        }
    }
    Ok(())
}

/// Edge fragment `U_R(φ) U(θ)` with parameters `{prefix}.theta`, `{prefix}.phi`.
pub fn build_edge_circuit(
    edge: (usize, usize),
    param_prefix: &str,
    n_qubits: usize,
) -> Result<CircuitBuilder> {
    let (p, q) = edge;
    if p == q {
        return Err(Error::InvalidGraph(format!(
            "edge ({p},{q}) allocates overlapping qubits"
        )));
    }
    if spin_orbital(p.max(q), 1) >= n_qubits {
        return Err(Error::IndexOutOfRange {
            index: p.max(q),
            limit: n_qubits / 2,
            context: "edge circuit".into(),
        });
    }
    let theta = format!("{param_prefix}.theta");
    let phi = format!("{param_prefix}.phi");
    let mut b = CircuitBuilder::new(n_qubits);
    b.parameter(theta.clone(), 0.0).parameter(phi.clone(), 0.0);
    pair_preparation(&mut b, edge, &theta);
    orbital_rotation(&mut b, p, q, &phi)?;
    Ok(b)
}

/// Circuit for one graph: all edge fragments, then (if `augmented`) one
/// orbital rotation per unconnected orbital pair in ascending pair order.
pub fn build_graph_circuit(
    graph: &MolecularGraph,
    prefix: &str,
    augmented: bool,
) -> Result<Circuit> {
    let n_qubits = 2 * graph.n_spatial();
    let mut b = CircuitBuilder::new(n_qubits);
    for (k, &edge) in graph.edges().iter().enumerate() {
        b.extend(build_edge_circuit(
            edge,
            &format!("{prefix}.e{k}"),
            n_qubits,
        )?);
    }
    if augmented {
        for (p, q) in graph.unconnected_pairs() {
            let name = format!("{prefix}.r{p}_{q}");
            b.parameter(name.clone(), 0.0);
            orbital_rotation(&mut b, p, q, &name)?;
        }
    }
    b.build()
}

/// Ordered graph circuits forming an effective basis.
#[derive(Debug, Clone, Serialize)]
pub struct BasisSpec {
    pub graphs: Vec<MolecularGraph>,
    pub circuits: Vec<Circuit>,
    pub augmented: bool,
}

impl BasisSpec {
    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.circuits.first().map_or(0, |c| c.n_qubits())
    }

    /// Basis restricted to the first `n` circuits.
    pub fn truncated(&self, n: usize) -> BasisSpec {
        BasisSpec {
            graphs: self.graphs[..n].to_vec(),
            circuits: self.circuits[..n].to_vec(),
            augmented: self.augmented,
        }
    }

    /// Basis of `n` circuits repeating the existing ones in order, for bases
    /// larger than the number of available graphs. Repeated circuits start
    /// from the same angles as their originals.
    pub fn cycled(&self, n: usize) -> BasisSpec {
        let len = self.len();
        if len == 0 {
            return self.clone();
        }
        BasisSpec {
            graphs: (0..n).map(|k| self.graphs[k % len].clone()).collect(),
            circuits: (0..n).map(|k| self.circuits[k % len].clone()).collect(),
            augmented: self.augmented,
        }
    }
}

/// One circuit per graph; circuit `k` uses the parameter namespace `g{k}`.
pub fn build_basis(graphs: &[MolecularGraph], augmented: bool) -> Result<BasisSpec> {
    let Some(first) = graphs.first() else {
        return Err(Error::InvalidGraph("empty graph list".into()));
    };
    let n_spatial = first.n_spatial();
    let n_electrons = first.n_electrons();
    let mut circuits = Vec::with_capacity(graphs.len());
    for (k, g) in graphs.iter().enumerate() {
        if g.n_spatial() != n_spatial {
            return Err(Error::InvalidGraph(format!(
                "graph {k} has {} orbitals, expected {n_spatial}",
                g.n_spatial()
            )));
        }
        if g.n_electrons() != n_electrons {
            return Err(Error::InvalidGraph(format!(
                "graph {k} prepares {} electrons, expected {n_electrons}",
                g.n_electrons()
            )));
        }
        circuits.push(build_graph_circuit(g, &format!("g{k}"), augmented)?);
    }
    Ok(BasisSpec {
        graphs: graphs.to_vec(),
        circuits,
        augmented,
    })
}
