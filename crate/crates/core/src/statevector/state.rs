use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamio::{Occupation, PauliHamiltonian};
use crate::pools::Excitation;
use crate::util::pairwise_sum;

/// Dense statevector; qubit 0 is the least significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl State {
    /// Computational basis state with qubit `p` set iff occupation bit `p` is set.
    pub fn init_hf(n_qubits: usize, occupation: Occupation) -> Result<Self> {
        if occupation.len() != n_qubits {
            return Err(Error::LengthMismatch {
                expected: n_qubits,
                actual: occupation.len(),
            });
        }
        State::basis(n_qubits, occupation.mask())
    }

    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        if n_qubits > 30 {
            return Err(Error::InvalidField {
                field: "n_qubits",
                message: format!("{n_qubits} qubits is too large for a dense statevector"),
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(State { n_qubits, amplitudes })
    }

    /// Wraps an amplitude vector of length `2^n_qubits`. The vector is used
    /// as given; callers are responsible for normalisation.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::LengthMismatch {
                expected: 1 << n_qubits,
                actual: amplitudes.len(),
            });
        }
        Ok(State { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubits(&self, indices: &[usize]) -> Result<()> {
        for (k, &p) in indices.iter().enumerate() {
            if p >= self.n_qubits {
                return Err(Error::InvalidExcitation(format!(
                    "qubit {p} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if indices[..k].contains(&p) {
                return Err(Error::InvalidExcitation(format!("repeated qubit {p}")));
            }
        }
        Ok(())
    }

    /// Rotates `|from set, to clear>` towards `|from clear, to set>`:
    /// the occupied pattern maps to `cos t |occ> + sin t |exc>` and the
    /// excited pattern to `cos t |exc> - sin t |occ>`. Every other basis
    /// state is left unchanged.
    fn rotate(&mut self, from_mask: u64, to_mask: u64, theta: f64) {
        let (s, c) = theta.sin_cos();
        let both = from_mask | to_mask;
        for b in 0..self.amplitudes.len() as u64 {
            if b & both == from_mask {
                let j = b ^ both;
                let (occ, exc) = (self.amplitudes[b as usize], self.amplitudes[j as usize]);
                self.amplitudes[b as usize] = occ * c - exc * s;
                self.amplitudes[j as usize] = exc * c + occ * s;
            }
        }
    }

    pub fn apply_single_excitation(mut self, p: usize, q: usize, theta: f64) -> Result<Self> {
        self.check_qubits(&[p, q])?;
        self.rotate(1 << p, 1 << q, theta);
        Ok(self)
    }

    pub fn apply_double_excitation(mut self, from: [usize; 2], to: [usize; 2], theta: f64) -> Result<Self> {
        self.check_qubits(&[from[0], from[1], to[0], to[1]])?;
        self.rotate(1 << from[0] | 1 << from[1], 1 << to[0] | 1 << to[1], theta);
        Ok(self)
    }

    pub fn apply_excitation(self, e: &Excitation, theta: f64) -> Result<Self> {
        match *e {
            Excitation::Single { from, to } => self.apply_single_excitation(from, to, theta),
            Excitation::Double { from, to } => self.apply_double_excitation(from, to, theta),
        }
    }

    /// `constant + sum_k c_k <psi|P_k|psi>`, evaluated term by term with a
    /// tree-reduced sum.
    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: h.n_qubits(),
            });
        }
        let mut re = Vec::with_capacity(h.terms().len());
        let mut im = Vec::with_capacity(h.terms().len());
        for (c, p) in h.terms() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, amp) in self.amplitudes.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let (out, phase) = p.apply_to_basis(b as u64);
                acc += self.amplitudes[out as usize].conj() * phase * amp;
            }
            re.push(c * acc.re);
            im.push(c * acc.im);
        }
        let imag = pairwise_sum(&im);
        debug_assert!(imag.abs() < 1e-10, "expectation has imaginary part {imag:e}");
        Ok(h.constant() + pairwise_sum(&re))
    }

    /// `sum_p <n_p>`.
    pub fn number_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * (b as u64).count_ones() as f64)
            .sum()
    }

    /// `<n_alpha> - <n_beta>` under interleaved ordering.
    pub fn spin_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let b = b as u64;
                let alpha = (b & 0x5555_5555_5555_5555).count_ones() as f64;
                let beta = (b & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as f64;
                a.norm_sqr() * (alpha - beta)
            })
            .sum()
    }
}
