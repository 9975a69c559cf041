#![allow(dead_code)]

use std::path::PathBuf;

use adaptforge::hamio::{IntegralSet, TwoBodyTerm};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real spin-orbital integrals with the symmetries of a molecular
/// Hamiltonian: spatial `(ij|kl)` with eightfold symmetry, spin-diagonal
/// one-body part, `h_pqrs = (ps|qr)` for matching spins.
pub fn random_integrals(n_spatial: usize, occupation: &str, seed: u64) -> IntegralSet {
    let mut rng = rng(seed);
    let m = n_spatial;
    let mut h1 = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = rng.gen_range(-1.0..1.0);
            h1[i][j] = v;
            h1[j][i] = v;
        }
    }
    let mut eri = vec![0.0; m * m * m * m];
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * m + j) * m + k) * m + l;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    if eri[idx(i, j, k, l)] != 0.0 {
                        continue;
                    }
                    let v = rng.gen_range(-0.5..0.5);
                    for (a, b, c, d) in [
                        (i, j, k, l),
                        (j, i, k, l),
                        (i, j, l, k),
                        (j, i, l, k),
                        (k, l, i, j),
                        (l, k, i, j),
                        (k, l, j, i),
                        (l, k, j, i),
                    ] {
                        eri[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    let n = 2 * m;
    let mut one = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            if p % 2 == q % 2 {
                one[p][q] = h1[p / 2][q / 2];
            }
        }
    }
    let mut two = Vec::new();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    if p % 2 == s % 2 && q % 2 == r % 2 {
                        let value = eri[idx(p / 2, s / 2, q / 2, r / 2)];
                        if value != 0.0 {
                            two.push(TwoBodyTerm { p, q, r, s, value });
                        }
                    }
                }
            }
        }
    }
    let n_electrons = occupation.chars().filter(|&c| c == '1').count();
    let energies = (0..m).map(|i| i as f64).collect();
    IntegralSet::new("random", n, n_electrons, 0.3, one, two, energies, occupation).unwrap()
}

/// `a_p |b>` in the occupation-number basis (bit `p` of `b` is orbital `p`),
/// with the sign from the orbitals below `p`.
fn annihilate(p: usize, b: u64) -> Option<(u64, f64)> {
    if b >> p & 1 == 0 {
        return None;
    }
    let below = (b & ((1u64 << p) - 1)).count_ones();
    Some((b ^ (1 << p), if below % 2 == 0 { 1.0 } else { -1.0 }))
}

fn create(p: usize, b: u64) -> Option<(u64, f64)> {
    if b >> p & 1 == 1 {
        return None;
    }
    let below = (b & ((1u64 << p) - 1)).count_ones();
    Some((b | (1 << p), if below % 2 == 0 { 1.0 } else { -1.0 }))
}

fn apply_string(ops: &[(bool, usize)], b: u64) -> Option<(u64, f64)> {
    let mut state = b;
    let mut sign = 1.0;
    for &(dagger, p) in ops.iter().rev() {
        let (next, s) = if dagger { create(p, state)? } else { annihilate(p, state)? };
        state = next;
        sign *= s;
    }
    Some((state, sign))
}

/// Second-quantized Hamiltonian built directly from fermionic operator
/// action on occupation-number states, without any qubit mapping.
pub fn fermionic_matrix(ints: &IntegralSet) -> DMatrix<f64> {
    let n = ints.n_spin_orbitals();
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim as u64 {
        h[(b as usize, b as usize)] += ints.constant();
        for p in 0..n {
            for q in 0..n {
                let v = ints.one_body(p, q);
                if v == 0.0 {
                    continue;
                }
                if let Some((out, s)) = apply_string(&[(true, p), (false, q)], b) {
                    h[(out as usize, b as usize)] += v * s;
                }
            }
        }
        for t in ints.two_body_terms() {
            if let Some((out, s)) = apply_string(&[(true, t.p), (true, t.q), (false, t.r), (false, t.s)], b) {
                h[(out as usize, b as usize)] += 0.5 * t.value * s;
            }
        }
    }
    h
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Dense matrix of `op` acting on qubit `q` of an `n`-qubit register
/// (qubit `q` is bit `q` of the basis index).
pub fn on_qubit(n: usize, q: usize, op: &DMatrix<f64>) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(2, 2);
    let mut m = DMatrix::<f64>::identity(1, 1);
    for k in (0..n).rev() {
        m = m.kronecker(if k == q { op } else { &id });
    }
    m
}

/// Real antisymmetric generator `prod sigma+_to prod sigma-_from - h.c.` of
/// a qubit excitation, built from single-qubit raising/lowering matrices.
pub fn excitation_generator(n: usize, from: &[usize], to: &[usize]) -> DMatrix<f64> {
    let raise = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
    let lower = raise.transpose();
    let dim = 1usize << n;
    let mut t = DMatrix::<f64>::identity(dim, dim);
    for &q in to {
        t = on_qubit(n, q, &raise) * t;
    }
    for &q in from {
        t = on_qubit(n, q, &lower) * t;
    }
    &t - t.transpose()
}

/// Brute-force minimum of a 1D function over an evenly spaced grid on
/// `[-pi, pi)`.
pub fn scan_min(f: impl Fn(f64) -> f64, points: usize) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    for k in 0..points {
        let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / points as f64;
        let e = f(t);
        if e < best.1 {
            best = (t, e);
        }
    }
    best
}
