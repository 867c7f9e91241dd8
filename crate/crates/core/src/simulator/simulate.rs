use num_complex::Complex64;

use super::circuit::{Circuit, Gate, ParameterBinding};
use super::state::StateVector;
use crate::error::Result;

/// Runs `c` on `|0…0>` with named parameter values.
pub fn simulate(c: &Circuit, params: &ParameterBinding) -> Result<StateVector> {
    let values = c.resolve(params)?;
    Ok(c.run(&values))
}

impl Circuit {
    /// Runs on `|0…0>` with values in parameter-table order.
    ///
    /// Panics if `values` is shorter than the parameter table.
    pub fn run(&self, values: &[f64]) -> StateVector {
        let mut state = StateVector::zero(self.n_qubits());
        self.apply_range(&mut state, values, 0, self.gates().len());
        state
    }

    /// Applies gates `start..end` to `state` in place.
    pub fn apply_range(&self, state: &mut StateVector, values: &[f64], start: usize, end: usize) {
        assert!(
            values.len() >= self.n_parameters(),
            "parameter vector too short"
        );
        let amps = state.amplitudes_mut();
        for i in start..end {
            match &self.gates()[i] {
                Gate::X { target } => apply_x(amps, *target),
                Gate::Cnot { control, target } => apply_cnot(amps, *control, *target),
                Gate::Ry { target, .. } => {
                    apply_ry(amps, None, *target, self.gate_angle(i, values))
                }
                Gate::Cry {
                    control, target, ..
                } => apply_ry(amps, Some(*control), *target, self.gate_angle(i, values)),
                Gate::PauliRot { pauli, .. } => apply_pauli_rotation(
                    amps,
                    pauli.x_mask() as usize,
                    pauli.z_mask() as usize,
                    pauli.y_count(),
                    self.gate_angle(i, values),
                ),
            }
        }
    }
}

fn apply_x(amps: &mut [Complex64], t: usize) {
    let bit = 1 << t;
    for b in 0..amps.len() {
        if b & bit == 0 {
            amps.swap(b, b | bit);
        }
    }
}

fn apply_cnot(amps: &mut [Complex64], c: usize, t: usize) {
    let cbit = 1 << c;
    let tbit = 1 << t;
    for b in 0..amps.len() {
        if b & cbit != 0 && b & tbit == 0 {
            amps.swap(b, b | tbit);
        }
    }
}

fn apply_ry(amps: &mut [Complex64], control: Option<usize>, t: usize, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let tbit = 1 << t;
    let cmask = control.map_or(0, |c| 1 << c);
    for b in 0..amps.len() {
        if b & tbit != 0 || b & cmask != cmask {
            continue;
        }
        let a0 = amps[b];
        let a1 = amps[b | tbit];
        amps[b] = a0 * c - a1 * s;
        amps[b | tbit] = a0 * s + a1 * c;
    }
}

/// `exp(-i (θ/2) P) = cos(θ/2) I - i sin(θ/2) P`.
fn apply_pauli_rotation(amps: &mut [Complex64], x: usize, z: usize, y_count: u32, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    // -i * i^{y_count}
    let base = match y_count % 4 {
        0 => Complex64::new(0.0, -s),
        1 => Complex64::new(s, 0.0),
        2 => Complex64::new(0.0, s),
        _ => Complex64::new(-s, 0.0),
    };
    let sign = |b: usize| {
        if (b & z).count_ones().is_multiple_of(2) {
            base
        } else {
            -base
        }
    };
    if x == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= Complex64::new(c, 0.0) + sign(b);
        }
        return;
    }
    // Visit each (b, b ^ x) pair once: b has the highest flipped bit clear.
    let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let b2 = b ^ x;
        let a = amps[b];
        let a2 = amps[b2];
        // (P v)[b2] = phase(b) v[b]; (P v)[b] = phase(b2) v[b2]
        amps[b] = a * c + sign(b2) * a2;
        amps[b2] = a2 * c + sign(b) * a;
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::simulator::circuit::{Angle, CircuitBuilder};

    fn close(a: Complex64, re: f64) -> bool {
        (a - Complex64::new(re, 0.0)).norm() < 1e-12
    }

    #[test]
    fn ry_pi_flips() {
        let mut b = CircuitBuilder::new(1);
        b.parameter("t", PI).gate(Gate::Ry {
            target: 0,
            angle: Angle::named("t", 1.0),
        });
        let c = b.build().unwrap();
        let v = simulate(&c, &c.binding()).unwrap();
        assert!(close(v.amplitudes()[0], 0.0));
        assert!(close(v.amplitudes()[1], 1.0));
    }

    #[test]
    fn unbound_parameter_errors() {
        let mut b = CircuitBuilder::new(1);
        b.parameter("t", PI).gate(Gate::Ry {
            target: 0,
            angle: Angle::named("t", 1.0),
        });
        let c = b.build().unwrap();
        assert!(simulate(&c, &ParameterBinding::new()).is_err());
    }

    #[test]
    fn cnot_and_x() {
        let mut b = CircuitBuilder::new(2);
        b.prepare(0).gate(Gate::Cnot {
            control: 0,
            target: 1,
        });
        let v = b.build().unwrap().run(&[]);
        assert!(close(v.amplitudes()[0b11], 1.0));
    }

    #[test]
    fn cry_respects_control() {
        let mut b = CircuitBuilder::new(2);
        b.gate(Gate::Cry {
            control: 0,
            target: 1,
            angle: Angle::fixed(PI),
        });
        let v = b.build().unwrap().run(&[]);
        assert!(close(v.amplitudes()[0], 1.0));
        let mut b = CircuitBuilder::new(2);
        b.prepare(0).gate(Gate::Cry {
            control: 0,
            target: 1,
            angle: Angle::fixed(PI),
        });
        let v = b.build().unwrap().run(&[]);
        assert!(close(v.amplitudes()[0b11], 1.0));
    }

    #[test]
    fn pauli_rotation_matches_ry() {
        // exp(-i θ/2 Y) is RY(θ)
        let theta = 0.7;
        let mut b = CircuitBuilder::new(1);
        b.gate(Gate::PauliRot {
            pauli: "Y0".parse().unwrap(),
            angle: Angle::fixed(theta),
        });
        let v = b.build().unwrap().run(&[]);
        assert!(close(v.amplitudes()[0], (theta / 2.0).cos()));
        assert!(close(v.amplitudes()[1], (theta / 2.0).sin()));
    }

    #[test]
    fn z_rotation_is_diagonal_phase() {
        let theta = 0.4;
        let mut b = CircuitBuilder::new(1);
        b.prepare(0).gate(Gate::PauliRot {
            pauli: "Z0".parse().unwrap(),
            angle: Angle::fixed(theta),
        });
        let v = b.build().unwrap().run(&[]);
        let expected = Complex64::from_polar(1.0, theta / 2.0);
        assert!((v.amplitudes()[1] - expected).norm() < 1e-12);
    }
}
