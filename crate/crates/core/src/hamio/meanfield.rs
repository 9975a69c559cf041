//! Mean-field quantities computed directly from integrals.

use super::integrals::IntegralSet;

pub const DEGENERATE_DENOMINATOR: f64 = 1e-8;

/// Hartree-Fock determinant energy
/// `c + sum_occ h_pp + 1/2 sum_{p,q occ} (h_pqqp - h_pqpq)`.
pub fn hf_energy(ints: &IntegralSet) -> f64 {
    let occ: Vec<usize> = ints.hf_occupation().occupied().collect();
    let mut e = ints.constant();
    for &p in &occ {
        e += ints.one_body(p, p);
    }
    let mut two = 0.0;
    for &p in &occ {
        for &q in &occ {
            two += ints.two_body(p, q, q, p) - ints.two_body(p, q, p, q);
        }
    }
    e + 0.5 * two
}

/// `<ab||ij> = <ab|ij> - <ab|ji>` in terms of the stored `h_pqrs = <pq|sr>`.
pub fn antisymmetrized(ints: &IntegralSet, a: usize, b: usize, i: usize, j: usize) -> f64 {
    ints.two_body(a, b, j, i) - ints.two_body(a, b, i, j)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mp2Amplitude {
    pub value: f64,
    /// Set when `|e_i + e_j - e_a - e_b|` fell below the degeneracy guard and
    /// the amplitude was reported as zero.
    pub degenerate: bool,
}

/// First-order amplitude `<ab||ij> / (e_i + e_j - e_a - e_b)` for the double
/// excitation `ij -> ab`.
pub fn mp2_amplitude(ints: &IntegralSet, i: usize, j: usize, a: usize, b: usize) -> Mp2Amplitude {
    if i == j || a == b {
        return Mp2Amplitude { value: 0.0, degenerate: false };
    }
    let denom = ints.spin_orbital_energy(i) + ints.spin_orbital_energy(j)
        - ints.spin_orbital_energy(a)
        - ints.spin_orbital_energy(b);
    if denom.abs() < DEGENERATE_DENOMINATOR {
        return Mp2Amplitude { value: 0.0, degenerate: true };
    }
    Mp2Amplitude {
        value: antisymmetrized(ints, a, b, i, j) / denom,
        degenerate: false,
    }
}

/// Sign picked up when `a+_{to...} a_{from...}` (annihilations applied in
/// order, then creations) acts on the determinant `occupation`, under
/// Jordan-Wigner ordering. Returns `None` when the result vanishes.
pub fn fermionic_sign(mut occupation: u64, from: &[usize], to: &[usize]) -> Option<f64> {
    let mut sign = 1.0;
    for &p in from {
        if occupation >> p & 1 == 0 {
            return None;
        }
        if (occupation & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        occupation &= !(1u64 << p);
    }
    for &p in to.iter().rev() {
        if occupation >> p & 1 == 1 {
            return None;
        }
        if (occupation & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        occupation |= 1u64 << p;
    }
    Some(sign)
}
