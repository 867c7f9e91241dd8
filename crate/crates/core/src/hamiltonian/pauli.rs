//! Pauli strings in symplectic (x, z) bitmask form.
//!
//! A string is `i^{|x & z|} X^x Z^z`, so a qubit with both bits set carries a
//! `Y = iXZ`. Qubit `q` is bit `q` of each mask, which matches the
//! little-endian amplitude indexing used by the simulator.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register a `PauliString` can address.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    /// Builds a string from `(qubit, factor)` pairs; a qubit may appear once.
    pub fn from_factors<I>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        let mut out = Self::IDENTITY;
        for (q, p) in factors {
            if q >= MAX_QUBITS {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    limit: MAX_QUBITS,
                    context: "pauli string".into(),
                });
            }
            let bit = 1u64 << q;
            if (out.x | out.z) & bit != 0 {
                return Err(Error::InvalidHamiltonian(format!(
                    "qubit {q} appears twice in pauli string"
                )));
            }
            match p {
                Pauli::X => out.x |= bit,
                Pauli::Y => {
                    out.x |= bit;
                    out.z |= bit;
                }
                Pauli::Z => out.z |= bit,
            }
        }
        Ok(out)
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        Self::from_factors([(q, p)]).expect("single-qubit pauli")
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Highest qubit index touched plus one (0 for the identity).
    pub fn min_qubits(&self) -> usize {
        MAX_QUBITS - self.support().leading_zeros() as usize
    }

    pub fn get(&self, q: usize) -> Option<Pauli> {
        let bit = 1u64 << q;
        match (self.x & bit != 0, self.z & bit != 0) {
            (true, true) => Some(Pauli::Y),
            (true, false) => Some(Pauli::X),
            (false, true) => Some(Pauli::Z),
            (false, false) => None,
        }
    }

    /// Factors in ascending qubit order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        (0..self.min_qubits()).filter_map(move |q| self.get(q).map(|p| (q, p)))
    }

    /// `P|b> = phase * |b ^ x>`; returns the phase for basis state `b`.
    #[inline]
    pub fn phase_on(&self, b: u64) -> Complex64 {
        let sign = if (b & self.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        I_POWERS[(self.y_count() % 4) as usize] * sign
    }

    /// Product `self * other` as `(phase, string)`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let w1 = (self.x & self.z).count_ones() as i64;
        let w2 = (other.x & other.z).count_ones() as i64;
        let w3 = (x & z).count_ones() as i64;
        let anti = (self.z & other.x).count_ones() as i64;
        let k = (w1 + w2 - w3 + 2 * anti).rem_euclid(4) as usize;
        (I_POWERS[k], PauliString { x, z })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, p) in self.factors() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let c = match p {
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}{q}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"X0 Z1 Y3"`; `"I"` or an empty string is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "I" {
            return Ok(Self::IDENTITY);
        }
        let mut factors = Vec::new();
        for tok in s.split_whitespace() {
            let (head, idx) = tok.split_at(1);
            let p = match head {
                "X" => Pauli::X,
                "Y" => Pauli::Y,
                "Z" => Pauli::Z,
                _ => {
                    return Err(Error::InvalidHamiltonian(format!(
                        "bad pauli factor `{tok}`"
                    )))
                }
            };
            let q: usize = idx
                .parse()
                .map_err(|_| Error::InvalidHamiltonian(format!("bad qubit index in `{tok}`")))?;
            factors.push((q, p));
        }
        Self::from_factors(factors)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Complex-weighted sum of Pauli strings, used while encoding fermionic
/// operators. Terms keep first-insertion order.
#[derive(Debug, Clone, Default)]
pub struct PauliSum {
    index: HashMap<PauliString, usize>,
    terms: Vec<(PauliString, Complex64)>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, p: PauliString, c: Complex64) {
        match self.index.get(&p) {
            Some(&i) => self.terms[i].1 += c,
            None => {
                self.index.insert(p, self.terms.len());
                self.terms.push((p, c));
            }
        }
    }

    pub fn add_sum(&mut self, other: &PauliSum, scale: Complex64) {
        for (p, c) in &other.terms {
            self.add(*p, *c * scale);
        }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &other.terms {
                let (ph, p) = p1.mul(p2);
                out.add(p, ph * c1 * c2);
            }
        }
        out
    }

    pub fn terms(&self) -> &[(PauliString, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}
