//! Spin-free molecular Hamiltonians and the integral file formats.
//!
//! # FCIDUMP grammar
//!
//! ```text
//! file    := header record*
//! header  := line containing "&FCI" ... up to a line that is "&END", "$END" or "/"
//!            holding comma-separated KEY=VALUE entries (VALUE may be a list)
//! record  := value i j k l          (whitespace separated, one per line)
//! ```
//!
//! Keys are case-insensitive. `NORB` and `NELEC` are required, `MS2`
//! (twice the spin projection) defaults to 0; all other keys are ignored.
//! Indices are 1-based spatial orbitals. Record kinds:
//!
//! | indices      | meaning                                  |
//! |--------------|------------------------------------------|
//! | `i j k l`    | two-electron integral `(ij|kl)`          |
//! | `i j 0 0`    | one-electron integral `h_ij`             |
//! | `0 0 0 0`    | scalar energy offset (nuclear repulsion) |
//! | `i 0 0 0`    | orbital energy, ignored                  |
//!
//! Two-electron integrals use the chemist convention
//! `(ij|kl) = ∫ φi(1) φj(1) r12⁻¹ φk(2) φl(2)` over real orbitals, so each
//! record stands for its 8 permutations `(ij|kl) = (ji|kl) = (ij|lk) =
//! (kl|ij) = ...`. A record that contradicts an already expanded value by
//! more than [`SYMMETRY_TOLERANCE`] is rejected. Values may use `E` or
//! Fortran `D` exponents; complex values `(re,im)` are rejected.
//!
//! The JSON alternative carries the same fields with full tensors:
//! `{"n_spatial", "n_electrons", "ms2", "constant", "h": [[..]], "g": [[[[..]]]]}`
//! with `g[p][q][r][s] = (pq|rs)`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted deviation between symmetry-equivalent integrals.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// `H = E0 + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`
/// over spatial orbitals `p, q, r, s` and spins `σ, τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionHamiltonian {
    n_spatial: usize,
    n_electrons: usize,
    ms2: i32,
    constant: f64,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl FermionHamiltonian {
    /// All-zero integrals with the given energy offset.
    pub fn zeros(n_spatial: usize, n_electrons: usize, constant: f64) -> Self {
        Self {
            n_spatial,
            n_electrons,
            ms2: 0,
            constant,
            h: vec![0.0; n_spatial * n_spatial],
            g: vec![0.0; n_spatial.pow(4)],
        }
    }

    /// Builds from full tensors (`h[p][q]`, `g[p][q][r][s] = (pq|rs)`) and
    /// validates the symmetry invariants.
    pub fn from_tensors(
        n_electrons: usize,
        ms2: i32,
        constant: f64,
        h: Vec<Vec<f64>>,
        g: Vec<Vec<Vec<Vec<f64>>>>,
    ) -> Result<Self> {
        let n = h.len();
        let mut out = Self::zeros(n, n_electrons, constant);
        out.ms2 = ms2;
        for (p, row) in h.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (q, v) in row.iter().enumerate() {
                out.h[p * n + q] = *v;
            }
        }
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.len(),
            });
        }
        for (p, a) in g.iter().enumerate() {
            for (q, b) in a.iter().enumerate() {
                for (r, c) in b.iter().enumerate() {
                    if c.len() != n || b.len() != n || a.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: c.len(),
                        });
                    }
                    for (s, v) in c.iter().enumerate() {
                        let i = out.g_index(p, q, r, s);
                        out.g[i] = *v;
                    }
                }
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// Twice the spin projection of the target sector.
    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_spatial + q]
    }

    /// Chemist-notation `(pq|rs)`.
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g[self.g_index(p, q, r, s)]
    }

    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_spatial;
        self.h[p * n + q] = v;
        self.h[q * n + p] = v;
    }

    /// Sets `(pq|rs)` and its 7 symmetry partners.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in permutations(p, q, r, s) {
            let i = self.g_index(a, b, c, d);
            self.g[i] = v;
        }
    }

    fn g_index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_spatial;
        ((p * n + q) * n + r) * n + s
    }

    /// Checks finiteness and the real-orbital permutation symmetries.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        if !self.constant.is_finite()
            || self.h.iter().any(|v| !v.is_finite())
            || self.g.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidHamiltonian("non-finite integral".into()));
        }
        for p in 0..n {
            for q in 0..n {
                let d = (self.h(p, q) - self.h(q, p)).abs();
                if d > SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidHamiltonian(format!(
                        "h[{p}][{q}] not symmetric (deviation {d:e})"
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        for (a, b, c, d) in permutations(p, q, r, s) {
                            let dev = (self.g(a, b, c, d) - v).abs();
                            if dev > SYMMETRY_TOLERANCE {
                                return Err(Error::InvalidHamiltonian(format!(
                                    "(pq|rs) symmetry broken at ({p}{q}|{r}{s}) (deviation {dev:e})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        if self.n_electrons > 2 * n {
            return Err(Error::InvalidHamiltonian(format!(
                "{} electrons do not fit in {} spin orbitals",
                self.n_electrons,
                2 * n
            )));
        }
        if (self.ms2.unsigned_abs() as usize) > self.n_electrons
            || (self.n_electrons as i64 + self.ms2 as i64) % 2 != 0
        {
            return Err(Error::InvalidHamiltonian(format!(
                "MS2={} incompatible with {} electrons",
                self.ms2, self.n_electrons
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let n = self.n_spatial;
        let doc = FermionJson {
            n_spatial: n,
            n_electrons: self.n_electrons,
            ms2: self.ms2,
            constant: self.constant,
            h: (0..n)
                .map(|p| (0..n).map(|q| self.h(p, q)).collect())
                .collect(),
            g: (0..n)
                .map(|p| {
                    (0..n)
                        .map(|q| {
                            (0..n)
                                .map(|r| (0..n).map(|s| self.g(p, q, r, s)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FermionJson = serde_json::from_str(text)?;
        if doc.h.len() != doc.n_spatial {
            return Err(Error::DimensionMismatch {
                expected: doc.n_spatial,
                got: doc.h.len(),
            });
        }
        Self::from_tensors(doc.n_electrons, doc.ms2, doc.constant, doc.h, doc.g)
    }
}

#[derive(Serialize, Deserialize)]
struct FermionJson {
    n_spatial: usize,
    n_electrons: usize,
    #[serde(default)]
    ms2: i32,
    constant: f64,
    h: Vec<Vec<f64>>,
    g: Vec<Vec<Vec<Vec<f64>>>>,
}

fn permutations(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

/// Loads an integral file, dispatching on extension (`.json` or FCIDUMP).
pub fn load_hamiltonian(path: impl AsRef<Path>) -> Result<FermionHamiltonian> {
    let path = path.as_ref();
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        FermionHamiltonian::from_json(&fs::read_to_string(path)?)
    } else {
        load_fcidump(path)
    }
}

pub fn load_fcidump(path: impl AsRef<Path>) -> Result<FermionHamiltonian> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_fcidump(&text, path)
}

/// Parses FCIDUMP text; `origin` only labels error messages.
pub fn parse_fcidump(text: &str, origin: &Path) -> Result<FermionHamiltonian> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = String::new();
    let mut started = false;
    let mut closed = false;
    for (_, line) in lines.by_ref() {
        let t = line.trim();
        let upper = t.to_ascii_uppercase();
        if !started {
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = upper.strip_prefix("&FCI") {
                started = true;
                header.push_str(rest);
                header.push(',');
                if rest.trim_end().ends_with("&END") || rest.trim_end().ends_with('/') {
                    closed = true;
                    break;
                }
                continue;
            }
            return Err(Error::MissingHeader("file does not start with &FCI".into()));
        }
        if upper == "&END" || upper == "$END" || upper == "/" {
            closed = true;
            break;
        }
        header.push_str(&upper);
        header.push(',');
    }
    if !started || !closed {
        return Err(Error::MissingHeader(
            "unterminated or absent &FCI header".into(),
        ));
    }
    let header = header.trim_end_matches(|c: char| c == ',' || c.is_whitespace());
    let header = header.trim_end_matches("&END").trim_end_matches('/');

    let norb = header_value(header, "NORB").ok_or_else(|| Error::MissingHeader("NORB".into()))?;
    let nelec =
        header_value(header, "NELEC").ok_or_else(|| Error::MissingHeader("NELEC".into()))?;
    let ms2 = header_value(header, "MS2").unwrap_or(0);
    if norb <= 0 || nelec < 0 {
        return Err(Error::MissingHeader(format!(
            "invalid NORB={norb} NELEC={nelec}"
        )));
    }
    let n = norb as usize;

    let mut ham = FermionHamiltonian::zeros(n, nelec as usize, 0.0);
    ham.ms2 = ms2 as i32;
    let mut seen_g = vec![false; n.pow(4)];
    let mut seen_h = vec![false; n * n];

    for (lineno, line) in lines {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(err(
                lineno,
                format!("expected 5 fields, found {}", toks.len()),
            ));
        }
        if toks[0].starts_with('(') {
            return Err(err(lineno, "complex coefficients are not supported".into()));
        }
        let value: f64 = toks[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| err(lineno, format!("bad value `{}`", toks[0])))?;
        if !value.is_finite() {
            return Err(err(lineno, "non-finite value".into()));
        }
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let v: usize = tok
                .parse()
                .map_err(|_| err(lineno, format!("bad index `{tok}`")))?;
            if v > n {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    limit: n,
                    context: format!("{}:{lineno}", origin.display()),
                });
            }
            *slot = v;
        }
        match idx {
            [0, 0, 0, 0] => ham.constant += value,
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (p, q) = (i - 1, j - 1);
                if seen_h[p * n + q] && (ham.h(p, q) - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(err(
                        lineno,
                        format!("h[{i}][{j}] contradicts its transpose"),
                    ));
                }
                ham.set_h(p, q, value);
                seen_h[p * n + q] = true;
                seen_h[q * n + p] = true;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                let at = ham.g_index(p, q, r, s);
                if seen_g[at] && (ham.g[at] - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(err(
                        lineno,
                        format!("({i}{j}|{k}{l}) contradicts a symmetry-equivalent record"),
                    ));
                }
                ham.set_g(p, q, r, s, value);
                for (a, b, c, d) in permutations(p, q, r, s) {
                    let at = ham.g_index(a, b, c, d);
                    seen_g[at] = true;
                }
            }
            _ => return Err(err(lineno, format!("invalid index pattern {idx:?}"))),
        }
    }
    ham.validate()?;
    Ok(ham)
}

/// First integer of `KEY=...` in the flattened header.
fn header_value(header: &str, key: &str) -> Option<i64> {
    let mut rest = header;
    while let Some(pos) = rest.find(key) {
        let before_ok = rest[..pos]
            .chars()
            .last()
            .is_none_or(|c| !c.is_ascii_alphanumeric());
        let after = rest[pos + key.len()..].trim_start();
        if before_ok {
            if let Some(v) = after.strip_prefix('=') {
                let v = v.trim_start();
                let end = v
                    .find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '+'))
                    .unwrap_or(v.len());
                return v[..end].parse().ok();
            }
        }
        rest = &rest[pos + key.len()..];
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<FermionHamiltonian> {
        parse_fcidump(text, Path::new("test.fcidump"))
    }

    #[test]
    fn single_one_body_record() {
        let ham = parse(" &FCI NORB=1,NELEC=1,MS2=1,\n &END\n 1.0  1 1 0 0\n").unwrap();
        assert_eq!(ham.n_spatial(), 1);
        assert_eq!(ham.h(0, 0), 1.0);
        assert_eq!(ham.g(0, 0, 0, 0), 0.0);
        assert_eq!(ham.constant(), 0.0);
    }

    #[test]
    fn expands_symmetry_and_reads_constant() {
        let text = "&FCI NORB=2,NELEC=2,\n ORBSYM=1,1,\n ISYM=1,\n/\n\
                    0.5 2 1 1 1\n0.25 2 1 0 0\n0.7 0 0 0 0\n-1.0D-1 1 0 0 0\n";
        let ham = parse(text).unwrap();
        assert_eq!(ham.ms2(), 0);
        assert_eq!(ham.g(0, 1, 0, 0), 0.5);
        assert_eq!(ham.g(0, 0, 1, 0), 0.5);
        assert_eq!(ham.g(0, 0, 0, 1), 0.5);
        assert_eq!(ham.h(0, 1), 0.25);
        assert_eq!(ham.constant(), 0.7);
    }

    #[test]
    fn index_out_of_range() {
        let e = parse("&FCI NORB=4,NELEC=4,\n&END\n1.0 5 1 0 0\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::IndexOutOfRange {
                    index: 5,
                    limit: 4,
                    ..
                }
            ),
            "{e}"
        );
    }

    #[test]
    fn missing_header() {
        assert!(matches!(
            parse("1.0 1 1 0 0\n"),
            Err(Error::MissingHeader(_))
        ));
        assert!(matches!(
            parse("&FCI NELEC=2,\n&END\n"),
            Err(Error::MissingHeader(_))
        ));
    }

    #[test]
    fn parse_error_carries_line_number() {
        match parse("&FCI NORB=2,NELEC=2,\n&END\n1.0 1 1 0 0\nabc 1 1 1 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn contradicting_symmetry_partner_rejected() {
        let e = parse("&FCI NORB=2,NELEC=2,\n&END\n0.5 2 1 1 1\n0.6 1 2 1 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
    }

    #[test]
    fn complex_values_rejected() {
        let e = parse("&FCI NORB=1,NELEC=2,\n&END\n(1.0,0.5) 1 1 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
    }

    #[test]
    fn json_roundtrip() {
        let mut ham = FermionHamiltonian::zeros(2, 2, 0.3);
        ham.set_h(0, 1, -0.2);
        ham.set_g(0, 1, 1, 1, 0.05);
        let back = FermionHamiltonian::from_json(&ham.to_json().unwrap()).unwrap();
        assert_eq!(back, ham);
    }

    #[test]
    fn json_rejects_broken_symmetry() {
        let mut ham = FermionHamiltonian::zeros(2, 2, 0.0);
        ham.set_h(0, 1, 0.1);
        let mut v: serde_json::Value = serde_json::from_str(&ham.to_json().unwrap()).unwrap();
        v["h"][0][1] = serde_json::json!(0.2);
        assert!(FermionHamiltonian::from_json(&v.to_string()).is_err());
    }
}
