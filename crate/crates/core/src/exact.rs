//! Exact ground-state energies in a fixed particle-number / S_z sector.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamio::PauliHamiltonian;
use crate::util::pairwise_sum;

/// Sector dimension up to which `fci_energy` uses a dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;

const SECTOR_IMAG_TOL: f64 = 1e-10;

/// Ascending basis indices with `n_electrons` set bits and, when given,
/// `alpha - beta = twice_sz` under interleaved spin ordering.
pub fn sector_basis(n_qubits: usize, n_electrons: usize, twice_sz: Option<i32>) -> Vec<u64> {
    assert!(n_qubits <= 63, "sector enumeration supports at most 63 qubits");
    if n_electrons > n_qubits {
        return Vec::new();
    }
    let alpha_mask = 0x5555_5555_5555_5555u64;
    let keep = |b: u64| match twice_sz {
        None => true,
        Some(sz) => (b & alpha_mask).count_ones() as i32 - (b & !alpha_mask).count_ones() as i32 == sz,
    };
    if n_electrons == 0 {
        return if keep(0) { vec![0] } else { Vec::new() };
    }
    let limit = 1u64 << n_qubits;
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << n_electrons) - 1;
    while v < limit {
        if keep(v) {
            out.push(v);
        }
        // next integer with the same popcount
        let t = v | (v - 1);
        let next = (t + 1) | (((!t & (!t).wrapping_neg()) - 1) >> (v.trailing_zeros() + 1));
        if next <= v {
            break;
        }
        v = next;
    }
    out
}

/// A qubit Hamiltonian restricted to a set of computational basis states,
/// stored column-wise with real entries. The constant is kept separately.
#[derive(Clone, Debug)]
pub struct SectorHamiltonian {
    basis: Vec<u64>,
    constant: f64,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    values: Vec<f64>,
}

impl SectorHamiltonian {
    pub fn build(h: &PauliHamiltonian, basis: Vec<u64>) -> Result<Self> {
        let dim = basis.len();
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut rows = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        let mut column: HashMap<u32, Complex64> = HashMap::new();
        for &b in &basis {
            column.clear();
            for (c, p) in h.terms() {
                let (out, phase) = p.apply_to_basis(b);
                if let Ok(i) = basis.binary_search(&out) {
                    *column.entry(i as u32).or_insert(Complex64::new(0.0, 0.0)) += phase * *c;
                }
            }
            let mut entries: Vec<(u32, Complex64)> = column.drain().collect();
            entries.sort_by_key(|e| e.0);
            for (i, v) in entries {
                if v.im.abs() > SECTOR_IMAG_TOL {
                    return Err(Error::ImaginaryResidue {
                        term: format!("sector element ({}, {b})", basis[i as usize]),
                        value: v.im,
                    });
                }
                if v.re != 0.0 {
                    rows.push(i);
                    values.push(v.re);
                }
            }
            col_ptr.push(rows.len());
        }
        Ok(SectorHamiltonian {
            basis,
            constant: h.constant(),
            col_ptr,
            rows,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn index_of(&self, b: u64) -> Option<usize> {
        self.basis.binary_search(&b).ok()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = (H - constant) x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.rows[k] as usize] += self.values[k] * xj;
            }
        }
    }

    /// `constant + x^T H x` for a real amplitude vector over the basis.
    pub fn expectation(&self, x: &[f64]) -> f64 {
        let partial: Vec<f64> = (0..self.dim())
            .map(|j| {
                let xj = x[j];
                if xj == 0.0 {
                    return 0.0;
                }
                let mut acc = 0.0;
                for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                    acc += self.values[k] * x[self.rows[k] as usize];
                }
                acc * xj
            })
            .collect();
        self.constant + pairwise_sum(&partial)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            m[(j, j)] += self.constant;
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                m[(self.rows[k] as usize, j)] += self.values[k];
            }
        }
        m
    }

    /// Lowest eigenvalue (constant included).
    pub fn ground_energy(&self, dense_limit: usize) -> f64 {
        if self.dim() <= dense_limit {
            let eig = SymmetricEigen::new(self.to_dense());
            eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            self.constant + lanczos_lowest(self)
        }
    }
}

/// Largest norm of `H|b>` that leaves the sector, over sector states `b`.
pub fn sector_leakage(h: &PauliHamiltonian, basis: &[u64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &b in basis {
        let mut outside: HashMap<u64, Complex64> = HashMap::new();
        for (c, p) in h.terms() {
            let (out, phase) = p.apply_to_basis(b);
            if basis.binary_search(&out).is_err() {
                *outside.entry(out).or_insert(Complex64::new(0.0, 0.0)) += phase * *c;
            }
        }
        let norm = outside.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(norm);
    }
    worst
}

/// Lowest eigenvalue of `h` restricted to the sector.
pub fn fci_energy(h: &PauliHamiltonian, n_electrons: usize, twice_sz: Option<i32>) -> Result<f64> {
    fci_energy_with_limit(h, n_electrons, twice_sz, DENSE_LIMIT)
}

pub fn fci_energy_with_limit(
    h: &PauliHamiltonian,
    n_electrons: usize,
    twice_sz: Option<i32>,
    dense_limit: usize,
) -> Result<f64> {
    let basis = sector_basis(h.n_qubits(), n_electrons, twice_sz);
    if basis.is_empty() {
        return Err(Error::EmptySector {
            n_qubits: h.n_qubits(),
            n_electrons,
        });
    }
    Ok(SectorHamiltonian::build(h, basis)?.ground_energy(dense_limit))
}

/// Lanczos with full reorthogonalization; returns the lowest eigenvalue of
/// `H - constant`.
fn lanczos_lowest(h: &SectorHamiltonian) -> f64 {
    let dim = h.dim();
    let max_steps = dim.min(400);
    let mut seed = 0x9E37_79B9_7F4A_7C15u64;
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    normalize(&mut v);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut previous = f64::INFINITY;
    for step in 0..max_steps {
        h.matvec(&v, &mut w);
        let alpha = dot(&v, &w);
        alphas.push(alpha);
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let proj = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= proj * qi);
            }
        }
        let beta = dot(&w, &w).sqrt();
        let lowest = tridiagonal_lowest(&alphas, &betas);
        if (previous - lowest).abs() < 1e-13 * lowest.abs().max(1.0) && step > 4 {
            return lowest;
        }
        previous = lowest;
        if beta < 1e-12 {
            return lowest;
        }
        betas.push(beta);
        v = w.iter().map(|x| x / beta).collect();
    }
    previous
}

fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    SymmetricEigen::new(t).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}
