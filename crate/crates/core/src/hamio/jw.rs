//! Jordan-Wigner image of the second-quantized Hamiltonian.

use std::collections::HashMap;

use num_complex::Complex64;

use super::integrals::IntegralSet;
use super::pauli::{PauliHamiltonian, PauliString};
use crate::error::{Error, Result};

pub const PRUNE_TOL: f64 = 1e-12;
pub const IMAG_TOL: f64 = 1e-12;

/// Ladder operator as the two-term Pauli sum `(X_p -/+ i Y_p)/2 * Z_{<p}`.
fn ladder(n: usize, p: usize, dagger: bool) -> [(Complex64, PauliString); 2] {
    let below = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let x_term = PauliString::from_masks(n, bit, below);
    let y_term = PauliString::from_masks(n, bit, below | bit);
    let y_coef = if dagger { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
    [(Complex64::new(0.5, 0.0), x_term), (y_coef, y_term)]
}

fn accumulate_product(
    acc: &mut HashMap<PauliString, Complex64>,
    coefficient: f64,
    factors: &[[(Complex64, PauliString); 2]],
    n: usize,
) {
    let mut partial: Vec<(Complex64, PauliString)> = vec![(Complex64::new(coefficient, 0.0), PauliString::identity(n))];
    for op in factors {
        let mut next = Vec::with_capacity(partial.len() * 2);
        for (c, s) in &partial {
            for (fc, fs) in op {
                let (phase, prod) = s.mul(fs);
                next.push((c * fc * phase, prod));
            }
        }
        partial = next;
    }
    for (c, s) in partial {
        *acc.entry(s).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
}

/// Maps `constant + sum h_pq a+_p a_q + 1/2 sum h_pqrs a+_p a+_q a_r a_s`
/// to a qubit Hamiltonian on `n_spin_orbitals` qubits.
///
/// Terms are accumulated in fixed index order from the dense integral
/// tensors, so the result does not depend on the order of two-body entries
/// in the source file.
pub fn jw_transform(ints: &IntegralSet) -> Result<PauliHamiltonian> {
    let n = ints.n_spin_orbitals();
    let create: Vec<_> = (0..n).map(|p| ladder(n, p, true)).collect();
    let annihilate: Vec<_> = (0..n).map(|p| ladder(n, p, false)).collect();
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();

    for p in 0..n {
        for q in 0..n {
            let h = ints.one_body(p, q);
            if h != 0.0 {
                accumulate_product(&mut acc, h, &[create[p], annihilate[q]], n);
            }
        }
    }
    let tensor = ints.tensor();
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            for r in 0..n {
                for s in 0..n {
                    if r == s {
                        continue;
                    }
                    let h = tensor[((p * n + q) * n + r) * n + s];
                    if h != 0.0 {
                        accumulate_product(
                            &mut acc,
                            0.5 * h,
                            &[create[p], create[q], annihilate[r], annihilate[s]],
                            n,
                        );
                    }
                }
            }
        }
    }

    let mut constant = ints.constant();
    let mut terms = Vec::with_capacity(acc.len());
    let mut entries: Vec<_> = acc.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for (s, c) in entries {
        if c.im.abs() > IMAG_TOL {
            return Err(Error::ImaginaryResidue {
                term: s.to_string(),
                value: c.im,
            });
        }
        if s.is_identity() {
            constant += c.re;
        } else {
            terms.push((c.re, s));
        }
    }
    Ok(PauliHamiltonian::new(n, constant, terms, PRUNE_TOL))
}
