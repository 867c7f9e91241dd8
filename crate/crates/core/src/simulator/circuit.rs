//! Parametric circuit IR.
//!
//! Rotation conventions:
//!
//! * `RY(θ) = exp(-i θ Y / 2)`, so `RY(π)|0> = |1>`.
//! * `CRY` applies `RY` to the target when the control is `|1>`.
//! * `PAULI_ROT(P, θ) = exp(-i (θ/2) P)`.
//!
//! Every rotation angle is `multiplier * value` where `value` comes from a
//! named entry of the parameter table or is a fixed constant.
//!
//! The JSON form is
//!
//! ```json
//! {
//!   "n_qubits": 4,
//!   "prefix_len": 2,
//!   "parameters": [{"name": "e0.theta", "value": 0.0}],
//!   "gates": [
//!     {"gate": "X", "target": 0},
//!     {"gate": "RY", "target": 2, "angle": {"param": "e0.theta", "multiplier": 1.0}},
//!     {"gate": "PAULI_ROT", "pauli": "X0 Z1 Y2", "angle": {"param": 0.5, "multiplier": -1.0}}
//!   ]
//! }
//! ```
//!
//! where a numeric `param` is a fixed angle. X gates may only appear in the
//! first `prefix_len` gates (the reference-state preparation).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::PauliString;

/// Named parameter values in radians.
pub type ParameterBinding = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamRef {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Angle {
    pub param: ParamRef,
    #[serde(default = "one")]
    pub multiplier: f64,
}

fn one() -> f64 {
    1.0
}

impl Angle {
    pub fn named(name: impl Into<String>, multiplier: f64) -> Self {
        Self {
            param: ParamRef::Named(name.into()),
            multiplier,
        }
    }

    pub fn fixed(value: f64) -> Self {
        Self {
            param: ParamRef::Fixed(value),
            multiplier: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum Gate {
    X {
        target: usize,
    },
    #[serde(rename = "CNOT")]
    Cnot {
        control: usize,
        target: usize,
    },
    #[serde(rename = "RY")]
    Ry {
        target: usize,
        angle: Angle,
    },
    #[serde(rename = "CRY")]
    Cry {
        control: usize,
        target: usize,
        angle: Angle,
    },
    #[serde(rename = "PAULI_ROT")]
    PauliRot {
        pauli: PauliString,
        angle: Angle,
    },
}

impl Gate {
    pub fn angle(&self) -> Option<&Angle> {
        match self {
            Gate::Ry { angle, .. } | Gate::Cry { angle, .. } | Gate::PauliRot { angle, .. } => {
                Some(angle)
            }
            _ => None,
        }
    }

    /// Qubits the gate acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { target } | Gate::Ry { target, .. } => vec![*target],
            Gate::Cnot { control, target }
            | Gate::Cry {
                control, target, ..
            } => {
                vec![*control, *target]
            }
            Gate::PauliRot { pauli, .. } => pauli.factors().map(|(q, _)| q).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub value: f64,
}

/// A validated gate sequence with its parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitDoc", into = "CircuitDoc")]
pub struct Circuit {
    n_qubits: usize,
    prefix_len: usize,
    parameters: Vec<Parameter>,
    gates: Vec<Gate>,
    // Per gate: parameter-table slot, or None for fixed / parameter-free gates.
    slots: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    n_qubits: usize,
    #[serde(default)]
    prefix_len: usize,
    parameters: Vec<Parameter>,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(d: CircuitDoc) -> Result<Self> {
        Circuit::new(d.n_qubits, d.prefix_len, d.parameters, d.gates)
    }
}

impl From<Circuit> for CircuitDoc {
    fn from(c: Circuit) -> Self {
        CircuitDoc {
            n_qubits: c.n_qubits,
            prefix_len: c.prefix_len,
            parameters: c.parameters,
            gates: c.gates,
        }
    }
}

impl Circuit {
    pub fn new(
        n_qubits: usize,
        prefix_len: usize,
        parameters: Vec<Parameter>,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        if n_qubits > crate::simulator::MAX_QUBITS {
            return Err(Error::DimensionCap {
                dim: n_qubits,
                cap: crate::simulator::MAX_QUBITS,
            });
        }
        let mut lookup = HashMap::new();
        for (i, p) in parameters.iter().enumerate() {
            if lookup.insert(p.name.clone(), i).is_some() {
                return Err(Error::InvalidCircuit(format!(
                    "duplicate parameter `{}`",
                    p.name
                )));
            }
        }
        if prefix_len > gates.len() {
            return Err(Error::InvalidCircuit("prefix longer than gate list".into()));
        }
        let mut slots = Vec::with_capacity(gates.len());
        for (i, g) in gates.iter().enumerate() {
            let qubits = g.qubits();
            for (k, &q) in qubits.iter().enumerate() {
                if q >= n_qubits {
                    return Err(Error::IndexOutOfRange {
                        index: q,
                        limit: n_qubits,
                        context: format!("gate {i}"),
                    });
                }
                if qubits[..k].contains(&q) {
                    return Err(Error::InvalidCircuit(format!("gate {i} repeats qubit {q}")));
                }
            }
            let is_x = matches!(g, Gate::X { .. });
            if i < prefix_len && !is_x {
                return Err(Error::InvalidCircuit(format!(
                    "gate {i} inside the preparation prefix is not X"
                )));
            }
            if i >= prefix_len && is_x {
                return Err(Error::InvalidCircuit(format!(
                    "X gate {i} outside the preparation prefix"
                )));
            }
            if let Gate::PauliRot { pauli, .. } = g {
                if pauli.is_identity() {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {i} rotates about identity"
                    )));
                }
            }
            let slot = match g.angle() {
                Some(Angle {
                    param: ParamRef::Named(name),
                    multiplier,
                }) => {
                    if !multiplier.is_finite() {
                        return Err(Error::InvalidCircuit(format!("gate {i} multiplier")));
                    }
                    Some(
                        *lookup
                            .get(name)
                            .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
                    )
                }
                _ => None,
            };
            slots.push(slot);
        }
        Ok(Self {
            n_qubits,
            prefix_len,
            parameters,
            gates,
            slots,
        })
    }

    /// Circuit with no gates.
    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            prefix_len: 0,
            parameters: Vec::new(),
            gates: Vec::new(),
            slots: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn n_parameters(&self) -> usize {
        self.parameters.len()
    }

    pub fn parameter_names(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().map(|p| p.name.as_str())
    }

    /// Current table values, in table order.
    pub fn values(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.value).collect()
    }

    pub fn set_values(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.parameters.len() {
            return Err(Error::DimensionMismatch {
                expected: self.parameters.len(),
                got: values.len(),
            });
        }
        for (p, v) in self.parameters.iter_mut().zip(values) {
            p.value = *v;
        }
        Ok(())
    }

    /// The current table as a name → value binding.
    pub fn binding(&self) -> ParameterBinding {
        self.parameters
            .iter()
            .map(|p| (p.name.clone(), p.value))
            .collect()
    }

    /// Resolves a binding into table order; every parameter must be bound.
    pub fn resolve(&self, binding: &ParameterBinding) -> Result<Vec<f64>> {
        self.parameters
            .iter()
            .map(|p| {
                binding
                    .get(&p.name)
                    .copied()
                    .ok_or_else(|| Error::UnboundParameter(p.name.clone()))
            })
            .collect()
    }

    /// Binding built from values in table order.
    pub fn bind(&self, values: &[f64]) -> ParameterBinding {
        self.parameters
            .iter()
            .zip(values)
            .map(|(p, v)| (p.name.clone(), *v))
            .collect()
    }

    /// Angle of gate `i` under `values` (table order).
    pub(crate) fn gate_angle(&self, i: usize, values: &[f64]) -> f64 {
        let angle = self.gates[i].angle().expect("rotation gate");
        let v = match (&angle.param, self.slots[i]) {
            (ParamRef::Fixed(v), _) => *v,
            (ParamRef::Named(_), Some(slot)) => values[slot],
            (ParamRef::Named(_), None) => unreachable!("resolved at construction"),
        };
        angle.multiplier * v
    }

    /// Index of the first gate depending on parameter `slot`, if any.
    pub fn first_use(&self, slot: usize) -> Option<usize> {
        self.slots.iter().position(|s| *s == Some(slot))
    }
}

/// Incremental construction; X gates added with [`prepare`] are hoisted into
/// the preparation prefix.
///
/// [`prepare`]: CircuitBuilder::prepare
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n_qubits: usize,
    prefix: Vec<Gate>,
    body: Vec<Gate>,
    parameters: Vec<Parameter>,
}

impl CircuitBuilder {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            prefix: Vec::new(),
            body: Vec::new(),
            parameters: Vec::new(),
        }
    }

    pub fn prepare(&mut self, target: usize) -> &mut Self {
        self.prefix.push(Gate::X { target });
        self
    }

    pub fn gate(&mut self, g: Gate) -> &mut Self {
        self.body.push(g);
        self
    }

    pub fn parameter(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.parameters.push(Parameter {
            name: name.into(),
            value,
        });
        self
    }

    /// Appends another builder's gates and parameters.
    pub fn extend(&mut self, other: CircuitBuilder) -> &mut Self {
        self.prefix.extend(other.prefix);
        self.body.extend(other.body);
        self.parameters.extend(other.parameters);
        self
    }

    pub fn build(self) -> Result<Circuit> {
        let prefix_len = self.prefix.len();
        let mut gates = self.prefix;
        gates.extend(self.body);
        Circuit::new(self.n_qubits, prefix_len, self.parameters, gates)
    }
}
