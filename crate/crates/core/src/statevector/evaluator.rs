//! Counted, cached ansatz energies.
//!
//! The default backend works in the particle-number / S_z sector of the
//! reference determinant. Qubit excitation gates conserve both quantities
//! for spin-conserving excitations, as does the molecular Hamiltonian, so
//! the sector holds the full ansatz state and the result equals the dense
//! statevector energy. A dense backend is available for cross-checks.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::exact::{sector_basis, SectorHamiltonian};
use crate::hamio::{Occupation, PauliHamiltonian};
use crate::pools::Excitation;
use crate::statevector::State;

/// Angles are keyed at this resolution.
pub const CACHE_RESOLUTION: f64 = 1e-12;

/// Monotone count of full-ansatz energy evaluations.
#[derive(Debug, Default)]
pub struct EvalCounter(AtomicU64);

impl EvalCounter {
    pub fn get(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }

    fn increment(&self) {
        self.0.fetch_add(1, Ordering::SeqCst);
    }
}

enum Backend {
    Sector {
        hamiltonian: SectorHamiltonian,
        reference_index: usize,
        pairs: Mutex<HashMap<Excitation, Arc<Vec<(u32, u32)>>>>,
    },
    Dense(PauliHamiltonian),
}

type CacheKey = Vec<(Excitation, i64)>;

pub struct EnergyEvaluator {
    backend: Backend,
    n_qubits: usize,
    reference: Occupation,
    counter: EvalCounter,
    cache: Mutex<HashMap<CacheKey, f64>>,
}

impl std::fmt::Debug for EnergyEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnergyEvaluator")
            .field("n_qubits", &self.n_qubits)
            .field("reference", &self.reference)
            .field("evaluations", &self.evaluations())
            .finish()
    }
}

impl EnergyEvaluator {
    /// Sector backend: the Hamiltonian is compiled once onto the
    /// number / S_z sector of `reference`.
    pub fn new(h: &PauliHamiltonian, reference: Occupation) -> Result<Self> {
        if reference.len() != h.n_qubits() {
            return Err(Error::LengthMismatch {
                expected: h.n_qubits(),
                actual: reference.len(),
            });
        }
        let basis = sector_basis(h.n_qubits(), reference.count(), Some(reference.twice_sz()));
        let hamiltonian = SectorHamiltonian::build(h, basis)?;
        let reference_index = hamiltonian
            .index_of(reference.mask())
            .expect("reference lies in its own sector");
        Ok(EnergyEvaluator {
            backend: Backend::Sector {
                hamiltonian,
                reference_index,
                pairs: Mutex::new(HashMap::new()),
            },
            n_qubits: h.n_qubits(),
            reference,
            counter: EvalCounter::default(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Full `2^n` statevector backend.
    pub fn dense(h: PauliHamiltonian, reference: Occupation) -> Result<Self> {
        if reference.len() != h.n_qubits() {
            return Err(Error::LengthMismatch {
                expected: h.n_qubits(),
                actual: reference.len(),
            });
        }
        Ok(EnergyEvaluator {
            n_qubits: h.n_qubits(),
            backend: Backend::Dense(h),
            reference,
            counter: EvalCounter::default(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn reference(&self) -> Occupation {
        self.reference
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    pub fn evaluations(&self) -> u64 {
        self.counter.get()
    }

    pub fn sector_dim(&self) -> Option<usize> {
        match &self.backend {
            Backend::Sector { hamiltonian, .. } => Some(hamiltonian.dim()),
            Backend::Dense(_) => None,
        }
    }

    /// Checks that `e` fits the register and conserves S_z.
    pub fn check_excitation(&self, e: &Excitation) -> Result<()> {
        if e.max_index() >= self.n_qubits {
            return Err(Error::InvalidExcitation(format!(
                "{e} out of range for {} qubits",
                self.n_qubits
            )));
        }
        if e.delta_twice_sz() != 0 {
            return Err(Error::InvalidExcitation(format!("{e} changes S_z")));
        }
        Ok(())
    }

    /// Energy of the ansatz applied to the reference determinant. Counts one
    /// evaluation unless the (ansatz, angles) pair was seen before.
    pub fn energy_of_ansatz(&self, ansatz: &Ansatz) -> Result<f64> {
        for e in ansatz.ops() {
            self.check_excitation(e)?;
        }
        Ok(self.energy(ansatz))
    }

    /// As [`energy_of_ansatz`](Self::energy_of_ansatz) for excitations
    /// already validated with [`check_excitation`](Self::check_excitation).
    ///
    /// Operators at angle zero act as the identity and are left out of the
    /// cache key, so the incumbent energy is reused when probing an appended
    /// operator at zero.
    pub fn energy(&self, ansatz: &Ansatz) -> f64 {
        let key: CacheKey = ansatz
            .iter()
            .filter_map(|(e, theta)| {
                let k = (theta / CACHE_RESOLUTION).round() as i64;
                (k != 0).then_some((*e, k))
            })
            .collect();
        if let Some(&e) = self.cache.lock().unwrap().get(&key) {
            return e;
        }
        let energy = self.compute(ansatz);
        self.counter.increment();
        self.cache.lock().unwrap().insert(key, energy);
        energy
    }

    /// Uncounted, uncached energy.
    pub fn compute(&self, ansatz: &Ansatz) -> f64 {
        match &self.backend {
            Backend::Sector { hamiltonian, .. } => hamiltonian.expectation(&self.sector_amplitudes(ansatz)),
            Backend::Dense(h) => self
                .state(ansatz)
                .and_then(|s| s.expectation(h))
                .expect("validated ansatz"),
        }
    }

    /// Dense statevector of the ansatz (uncounted).
    pub fn state(&self, ansatz: &Ansatz) -> Result<State> {
        let mut state = State::init_hf(self.n_qubits, self.reference)?;
        for (e, theta) in ansatz.iter() {
            state = state.apply_excitation(e, theta)?;
        }
        Ok(state)
    }

    /// Real amplitudes over the sector basis (sector backend only).
    pub fn sector_amplitudes(&self, ansatz: &Ansatz) -> Vec<f64> {
        let Backend::Sector {
            hamiltonian,
            reference_index,
            pairs,
        } = &self.backend
        else {
            panic!("sector amplitudes need the sector backend");
        };
        let mut psi = vec![0.0; hamiltonian.dim()];
        psi[*reference_index] = 1.0;
        for (e, theta) in ansatz.iter() {
            if theta == 0.0 {
                continue;
            }
            let gate = {
                let mut cache = pairs.lock().unwrap();
                cache
                    .entry(*e)
                    .or_insert_with(|| Arc::new(sector_pairs(hamiltonian, e)))
                    .clone()
            };
            let (s, c) = theta.sin_cos();
            for &(i, j) in gate.iter() {
                let (occ, exc) = (psi[i as usize], psi[j as usize]);
                psi[i as usize] = occ * c - exc * s;
                psi[j as usize] = exc * c + occ * s;
            }
        }
        psi
    }
}

/// `(occupied-pattern index, excited-pattern index)` pairs of a gate.
fn sector_pairs(h: &SectorHamiltonian, e: &Excitation) -> Vec<(u32, u32)> {
    let (from, to) = e.masks();
    let both = from | to;
    h.basis()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b & both == from)
        .map(|(i, &b)| {
            let j = h.index_of(b ^ both).expect("spin-conserving excitation stays in sector");
            (i as u32, j as u32)
        })
        .collect()
}
