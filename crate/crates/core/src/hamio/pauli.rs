use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis stored as X/Z bit masks, with
/// `Y = i X Z` on a qubit where both bits are set. Identity elsewhere.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

/// Powers of `i`, indexed mod 4.
const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64);
        PauliString { n_qubits, x: 0, z: 0 }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        assert!(n_qubits <= 64);
        let mask = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        assert!(x & !mask == 0 && z & !mask == 0, "mask exceeds qubit count");
        PauliString { n_qubits, x, z }
    }

    pub fn from_factors(n_qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = PauliString::identity(n_qubits);
        for &(q, p) in factors {
            if q >= n_qubits {
                return Err(Error::InvalidField {
                    field: "factors",
                    message: format!("qubit {q} out of range for {n_qubits} qubits"),
                });
            }
            let bit = 1u64 << q;
            s.x &= !bit;
            s.z &= !bit;
            match p {
                Pauli::X => s.x |= bit,
                Pauli::Y => {
                    s.x |= bit;
                    s.z |= bit
                }
                Pauli::Z => s.z |= bit,
            }
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
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

    /// Non-identity factors in ascending qubit order.
    pub fn factors(&self) -> Vec<(usize, Pauli)> {
        (0..self.n_qubits)
            .filter_map(|q| {
                let (xb, zb) = (self.x >> q & 1, self.z >> q & 1);
                match (xb, zb) {
                    (1, 0) => Some((q, Pauli::X)),
                    (1, 1) => Some((q, Pauli::Y)),
                    (0, 1) => Some((q, Pauli::Z)),
                    _ => None,
                }
            })
            .collect()
    }

    /// `P |b> = phase * |b'>` for a computational basis index `b`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let ipow = (self.x & self.z).count_ones() + 2 * (b & self.z).count_ones();
        (b ^ self.x, I_POW[(ipow & 3) as usize])
    }

    /// Product `self * other` as `(phase, string)`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        // Write each as i^{popcount(x&z)} X^x Z^z; moving Z^z1 past X^x2 gives (-1)^{popcount(z1&x2)}.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let mut power = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        power = power.rem_euclid(4);
        (
            I_POW[power as usize],
            PauliString { n_qubits: self.n_qubits, x, z },
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors = self.factors();
        if factors.is_empty() {
            return f.write_str("I");
        }
        for (k, (q, p)) in factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p:?}{q}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// `constant + sum_k c_k P_k` with real coefficients, canonically sorted and
/// free of duplicate strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    constant: f64,
    terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    /// Merges duplicate strings, folds identity terms into the constant and
    /// drops coefficients below `prune`.
    pub fn new(n_qubits: usize, constant: f64, terms: Vec<(f64, PauliString)>, prune: f64) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(f64, PauliString)> = Vec::with_capacity(terms.len());
        let mut constant = constant;
        for (c, p) in terms {
            assert_eq!(p.n_qubits(), n_qubits, "term qubit count");
            if p.is_identity() {
                constant += c;
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.1 == p => last.0 += c,
                _ => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| c.abs() >= prune);
        PauliHamiltonian { n_qubits, constant, terms: merged }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Dense `2^n x 2^n` matrix (row = output basis index). Only sensible for
    /// small registers.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        assert!(self.n_qubits <= 14, "dense matrix too large");
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for b in 0..dim {
            m[(b, b)] += Complex64::new(self.constant, 0.0);
            for (c, p) in &self.terms {
                let (out, phase) = p.apply_to_basis(b as u64);
                m[(out as usize, b)] += phase * *c;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: Pauli) -> PauliString {
        PauliString::from_factors(1, &[(0, p)]).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let (x, y, z) = (single(Pauli::X), single(Pauli::Y), single(Pauli::Z));
        let i = Complex64::i();
        assert_eq!(x.mul(&y), (i, z));
        assert_eq!(y.mul(&z), (i, x));
        assert_eq!(z.mul(&x), (i, y));
        assert_eq!(y.mul(&x), (-i, z));
        assert_eq!(y.mul(&y), (Complex64::new(1.0, 0.0), PauliString::identity(1)));
    }

    #[test]
    fn basis_action() {
        let y = single(Pauli::Y);
        assert_eq!(y.apply_to_basis(0), (1, Complex64::i()));
        assert_eq!(y.apply_to_basis(1), (0, -Complex64::i()));
        let z = single(Pauli::Z);
        assert_eq!(z.apply_to_basis(1), (1, Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn merging_and_identity_folding() {
        let z0 = PauliString::from_factors(2, &[(0, Pauli::Z)]).unwrap();
        let h = PauliHamiltonian::new(
            2,
            1.0,
            vec![(0.5, z0), (0.25, PauliString::identity(2)), (-0.5, z0)],
            1e-12,
        );
        assert_eq!(h.constant(), 1.25);
        assert!(h.terms().is_empty());
    }

    #[test]
    fn display_is_ascending() {
        let p = PauliString::from_factors(4, &[(3, Pauli::Z), (0, Pauli::X), (1, Pauli::Y)]).unwrap();
        assert_eq!(p.to_string(), "X0 Y1 Z3");
        assert!(PauliString::from_factors(2, &[(2, Pauli::X)]).is_err());
    }
}
