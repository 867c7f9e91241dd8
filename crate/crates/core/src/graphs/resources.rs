//! Gate-count estimates under a fixed compilation to CNOT + single-qubit gates.
//!
//! | IR gate                      | compiled                                        |
//! |------------------------------|-------------------------------------------------|
//! | `X`, `RY`                    | one single-qubit gate                           |
//! | `CNOT`                       | one CNOT                                        |
//! | `CRY`                        | `RY, CNOT, RY, CNOT`                            |
//! | `PAULI_ROT` on k qubits      | basis changes, CNOT ladder (k-1), `RZ`, ladder back (k-1), basis changes back |

use serde::Serialize;

use crate::simulator::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resources {
    pub cnot_count: usize,
    pub parameter_count: usize,
    pub depth: usize,
}

enum Op {
    One(usize),
    Two(usize, usize),
}

fn compile(g: &Gate) -> Vec<Op> {
    match g {
        Gate::X { target } | Gate::Ry { target, .. } => vec![Op::One(*target)],
        Gate::Cnot { control, target } => vec![Op::Two(*control, *target)],
        Gate::Cry {
            control, target, ..
        } => vec![
            Op::One(*target),
            Op::Two(*control, *target),
            Op::One(*target),
            Op::Two(*control, *target),
        ],
        Gate::PauliRot { pauli, .. } => {
            let factors: Vec<_> = pauli.factors().collect();
            let qubits: Vec<usize> = factors.iter().map(|(q, _)| *q).collect();
            let changes: Vec<usize> = factors
                .iter()
                .filter(|(_, p)| *p != crate::hamiltonian::Pauli::Z)
                .map(|(q, _)| *q)
                .collect();
            let mut ops: Vec<Op> = changes.iter().map(|&q| Op::One(q)).collect();
            for w in qubits.windows(2) {
                ops.push(Op::Two(w[0], w[1]));
            }
            ops.push(Op::One(*qubits.last().expect("non-identity rotation")));
            for w in qubits.windows(2).rev() {
                ops.push(Op::Two(w[0], w[1]));
            }
            ops.extend(changes.iter().map(|&q| Op::One(q)));
            ops
        }
    }
}

/// CNOT count, named parameter count and compiled depth of `c`.
pub fn count_resources(c: &Circuit) -> Resources {
    let mut level = vec![0usize; c.n_qubits()];
    let mut cnots = 0;
    for g in c.gates() {
        for op in compile(g) {
            match op {
                Op::One(q) => level[q] += 1,
                Op::Two(a, b) => {
                    cnots += 1;
                    let d = level[a].max(level[b]) + 1;
                    level[a] = d;
                    level[b] = d;
                }
            }
        }
    }
    Resources {
        cnot_count: cnots,
        parameter_count: c.n_parameters(),
        depth: level.into_iter().max().unwrap_or(0),
    }
}
