//! Molecular integral sets and the JSON integral file format.
//!
//! Spin orbitals are interleaved: index `2i` is the alpha spin of spatial
//! orbital `i` and `2i + 1` its beta partner. Two-body entries
//! `[p, q, r, s, value]` are the coefficient `h_pqrs` of
//! `a+_p a+_q a_r a_s` in `H = c + sum h_pq a+_p a_q + 1/2 sum h_pqrs a+_p a+_q a_r a_s`.

use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const SYMMETRY_TOL: f64 = 1e-10;

/// Occupation bitstring over spin orbitals. Character `p` of the textual
/// form is the occupation of spin orbital `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Occupation {
    n: usize,
    bits: u64,
}

impl Occupation {
    pub fn from_mask(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "at most 64 spin orbitals");
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Occupation { n, bits: bits & mask }
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.len() > 64 {
            return Err(Error::InvalidField {
                field: "hf_occupation",
                message: format!("length {} exceeds 64", text.len()),
            });
        }
        let mut bits = 0u64;
        for (p, ch) in text.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << p,
                '0' => {}
                other => {
                    return Err(Error::InvalidField {
                        field: "hf_occupation",
                        message: format!("unexpected character {other:?} at position {p}"),
                    })
                }
            }
        }
        Ok(Occupation { n: text.chars().count(), bits })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mask(&self) -> u64 {
        self.bits
    }

    pub fn is_set(&self, p: usize) -> bool {
        p < self.n && self.bits >> p & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn n_alpha(&self) -> usize {
        (self.bits & 0x5555_5555_5555_5555).count_ones() as usize
    }

    pub fn n_beta(&self) -> usize {
        (self.bits & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as usize
    }

    /// `2 * S_z` = alpha count minus beta count.
    pub fn twice_sz(&self) -> i32 {
        self.n_alpha() as i32 - self.n_beta() as i32
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&p| self.is_set(p))
    }

    pub fn virtuals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&p| !self.is_set(p))
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.n {
            f.write_str(if self.is_set(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Occupation({self})")
    }
}

/// One `h_pqrs` coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoBodyTerm {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub value: f64,
}

/// On-disk shape of an integral file. Every field is optional here so that a
/// missing field is reported by name during validation.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct IntegralFile {
    pub format_version: Option<u32>,
    pub molecule_label: Option<String>,
    pub bond_length: Option<f64>,
    pub basis_label: Option<String>,
    pub n_spin_orbitals: Option<usize>,
    pub n_electrons: Option<usize>,
    pub constant: Option<f64>,
    pub one_body: Option<Vec<Vec<f64>>>,
    pub two_body: Option<Vec<(usize, usize, usize, usize, f64)>>,
    pub orbital_energies: Option<Vec<f64>>,
    pub hf_occupation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreps: Option<Vec<String>>,
}

/// Validated integrals for one molecular geometry.
#[derive(Debug)]
pub struct IntegralSet {
    molecule_label: String,
    bond_length: f64,
    basis_label: String,
    n_spin_orbitals: usize,
    n_electrons: usize,
    constant: f64,
    one_body: Vec<f64>,
    two_body: Vec<TwoBodyTerm>,
    orbital_energies: Vec<f64>,
    hf_occupation: Occupation,
    irreps: Option<Vec<String>>,
    tensor: OnceLock<Vec<f64>>,
}

impl Clone for IntegralSet {
    fn clone(&self) -> Self {
        IntegralSet {
            molecule_label: self.molecule_label.clone(),
            bond_length: self.bond_length,
            basis_label: self.basis_label.clone(),
            n_spin_orbitals: self.n_spin_orbitals,
            n_electrons: self.n_electrons,
            constant: self.constant,
            one_body: self.one_body.clone(),
            two_body: self.two_body.clone(),
            orbital_energies: self.orbital_energies.clone(),
            hf_occupation: self.hf_occupation,
            irreps: self.irreps.clone(),
            tensor: OnceLock::new(),
        }
    }
}

/// Reads and validates an integral file.
pub fn load_integrals(path: impl AsRef<Path>) -> Result<IntegralSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    IntegralSet::from_json(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

impl IntegralSet {
    /// Builds an integral set from in-memory data. `one_body` is row-major
    /// `n x n`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        molecule_label: impl Into<String>,
        n_spin_orbitals: usize,
        n_electrons: usize,
        constant: f64,
        one_body: Vec<Vec<f64>>,
        two_body: Vec<TwoBodyTerm>,
        orbital_energies: Vec<f64>,
        hf_occupation: &str,
    ) -> Result<Self> {
        let file = IntegralFile {
            format_version: Some(FORMAT_VERSION),
            molecule_label: Some(molecule_label.into()),
            bond_length: Some(0.0),
            basis_label: Some(String::new()),
            n_spin_orbitals: Some(n_spin_orbitals),
            n_electrons: Some(n_electrons),
            constant: Some(constant),
            one_body: Some(one_body),
            two_body: Some(two_body.iter().map(|t| (t.p, t.q, t.r, t.s, t.value)).collect()),
            orbital_energies: Some(orbital_energies),
            hf_occupation: Some(hf_occupation.to_string()),
            irreps: None,
        };
        Self::from_file(file)
    }

    pub fn with_bond_length(mut self, bond_length: f64) -> Self {
        self.bond_length = bond_length;
        self
    }

    pub fn with_irreps(mut self, irreps: Vec<String>) -> Result<Self> {
        if irreps.len() != self.n_spatial() {
            return Err(Error::InvalidField {
                field: "irreps",
                message: format!("{} labels for {} spatial orbitals", irreps.len(), self.n_spatial()),
            });
        }
        self.irreps = Some(irreps);
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: IntegralFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: Default::default(),
            message: e.to_string(),
        })?;
        Self::from_file(file)
    }

    pub fn from_file(file: IntegralFile) -> Result<Self> {
        let version = file.format_version.ok_or(Error::MissingField("format_version"))?;
        if version != FORMAT_VERSION {
            return Err(Error::InvalidField {
                field: "format_version",
                message: format!("unsupported version {version}"),
            });
        }
        let molecule_label = file.molecule_label.ok_or(Error::MissingField("molecule_label"))?;
        let bond_length = file.bond_length.ok_or(Error::MissingField("bond_length"))?;
        let basis_label = file.basis_label.ok_or(Error::MissingField("basis_label"))?;
        let n = file.n_spin_orbitals.ok_or(Error::MissingField("n_spin_orbitals"))?;
        let n_electrons = file.n_electrons.ok_or(Error::MissingField("n_electrons"))?;
        let constant = file.constant.ok_or(Error::MissingField("constant"))?;
        let one_body_rows = file.one_body.ok_or(Error::MissingField("one_body"))?;
        let two_body_raw = file.two_body.ok_or(Error::MissingField("two_body"))?;
        let orbital_energies = file.orbital_energies.ok_or(Error::MissingField("orbital_energies"))?;
        let occupation_text = file.hf_occupation.ok_or(Error::MissingField("hf_occupation"))?;

        if n > 64 {
            return Err(Error::InvalidField {
                field: "n_spin_orbitals",
                message: format!("{n} exceeds the 64 spin-orbital limit"),
            });
        }
        if n_electrons > n {
            return Err(Error::InvalidField {
                field: "n_electrons",
                message: format!("{n_electrons} electrons exceed {n} spin orbitals"),
            });
        }
        if one_body_rows.len() != n || one_body_rows.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidField {
                field: "one_body",
                message: format!("expected a {n}x{n} matrix"),
            });
        }
        let one_body: Vec<f64> = one_body_rows.into_iter().flatten().collect();
        for p in 0..n {
            for q in 0..p {
                let diff = (one_body[p * n + q] - one_body[q * n + p]).abs();
                if diff > SYMMETRY_TOL {
                    return Err(Error::InvalidField {
                        field: "one_body",
                        message: format!("asymmetric at ({p},{q}): |h_pq - h_qp| = {diff:e}"),
                    });
                }
            }
        }
        let mut two_body = Vec::with_capacity(two_body_raw.len());
        for (p, q, r, s, value) in two_body_raw {
            if p.max(q).max(r).max(s) >= n {
                return Err(Error::InvalidField {
                    field: "two_body",
                    message: format!("index in [{p},{q},{r},{s}] out of range for {n} spin orbitals"),
                });
            }
            two_body.push(TwoBodyTerm { p, q, r, s, value });
        }
        let hf_occupation = Occupation::parse(&occupation_text)?;
        if hf_occupation.len() != n {
            return Err(Error::InvalidField {
                field: "hf_occupation",
                message: format!("length {} but {n} spin orbitals", hf_occupation.len()),
            });
        }
        if hf_occupation.count() != n_electrons {
            return Err(Error::InvalidField {
                field: "hf_occupation",
                message: format!(
                    "{} set bits but n_electrons = {n_electrons}",
                    hf_occupation.count()
                ),
            });
        }
        if n % 2 == 0 && orbital_energies.len() != n / 2 {
            return Err(Error::InvalidField {
                field: "orbital_energies",
                message: format!("{} energies for {} spatial orbitals", orbital_energies.len(), n / 2),
            });
        }
        if let Some(irreps) = &file.irreps {
            if irreps.len() != n / 2 {
                return Err(Error::InvalidField {
                    field: "irreps",
                    message: format!("{} labels for {} spatial orbitals", irreps.len(), n / 2),
                });
            }
        }

        Ok(IntegralSet {
            molecule_label,
            bond_length,
            basis_label,
            n_spin_orbitals: n,
            n_electrons,
            constant,
            one_body,
            two_body,
            orbital_energies,
            hf_occupation,
            irreps: file.irreps,
            tensor: OnceLock::new(),
        })
    }

    pub fn to_file(&self) -> IntegralFile {
        let n = self.n_spin_orbitals;
        IntegralFile {
            format_version: Some(FORMAT_VERSION),
            molecule_label: Some(self.molecule_label.clone()),
            bond_length: Some(self.bond_length),
            basis_label: Some(self.basis_label.clone()),
            n_spin_orbitals: Some(n),
            n_electrons: Some(self.n_electrons),
            constant: Some(self.constant),
            one_body: Some(self.one_body.chunks(n.max(1)).map(|r| r.to_vec()).collect()),
            two_body: Some(self.two_body.iter().map(|t| (t.p, t.q, t.r, t.s, t.value)).collect()),
            orbital_energies: Some(self.orbital_energies.clone()),
            hf_occupation: Some(self.hf_occupation.to_string()),
            irreps: self.irreps.clone(),
        }
    }

    pub fn molecule_label(&self) -> &str {
        &self.molecule_label
    }

    pub fn bond_length(&self) -> f64 {
        self.bond_length
    }

    pub fn basis_label(&self) -> &str {
        &self.basis_label
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spin_orbitals / 2
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_spin_orbitals + q]
    }

    pub fn two_body_terms(&self) -> &[TwoBodyTerm] {
        &self.two_body
    }

    /// Dense `h_pqrs`, duplicate entries summed.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spin_orbitals;
        self.tensor()[((p * n + q) * n + r) * n + s]
    }

    pub(crate) fn tensor(&self) -> &[f64] {
        self.tensor.get_or_init(|| {
            let n = self.n_spin_orbitals;
            let mut t = vec![0.0; n * n * n * n];
            for e in &self.two_body {
                t[((e.p * n + e.q) * n + e.r) * n + e.s] += e.value;
            }
            t
        })
    }

    pub fn orbital_energies(&self) -> &[f64] {
        &self.orbital_energies
    }

    /// Orbital energy of a spin orbital (spatial energy duplicated over spin).
    pub fn spin_orbital_energy(&self, p: usize) -> f64 {
        self.orbital_energies[p / 2]
    }

    pub fn hf_occupation(&self) -> Occupation {
        self.hf_occupation
    }

    pub fn irreps(&self) -> Option<&[String]> {
        self.irreps.as_deref()
    }
}

/// File-name label for a bond length: shortest decimal form with at least one
/// fractional digit (`2` -> `2.0`, `0.7414` -> `0.7414`).
pub fn bond_label(bond_length: f64) -> String {
    let mut s = format!("{bond_length:.4}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.push('0');
    }
    s
}
