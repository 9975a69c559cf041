use std::path::Path;

use crate::error::Result;
use crate::exact::fci_energy;
use crate::fixtures::load_fixture;
use crate::hamio::{jw_transform, IntegralSet, Occupation, PauliHamiltonian};
use crate::statevector::EnergyEvaluator;

/// One molecular geometry: integrals, qubit Hamiltonian and its sector FCI
/// energy.
#[derive(Clone, Debug)]
pub struct Problem {
    molecule: String,
    ints: IntegralSet,
    hamiltonian: PauliHamiltonian,
    fci: f64,
}

impl Problem {
    pub fn new(molecule: &str, ints: IntegralSet) -> Result<Self> {
        let hamiltonian = jw_transform(&ints)?;
        let occ = ints.hf_occupation();
        let fci = fci_energy(&hamiltonian, ints.n_electrons(), Some(occ.twice_sz()))?;
        Ok(Problem {
            molecule: molecule.to_ascii_lowercase(),
            ints,
            hamiltonian,
            fci,
        })
    }

    pub fn load(root: &Path, molecule: &str, bond_length: f64) -> Result<Self> {
        Problem::new(molecule, load_fixture(root, molecule, bond_length)?)
    }

    pub fn molecule(&self) -> &str {
        &self.molecule
    }

    pub fn bond_length(&self) -> f64 {
        self.ints.bond_length()
    }

    pub fn integrals(&self) -> &IntegralSet {
        &self.ints
    }

    pub fn hamiltonian(&self) -> &PauliHamiltonian {
        &self.hamiltonian
    }

    pub fn n_qubits(&self) -> usize {
        self.ints.n_spin_orbitals()
    }

    pub fn reference(&self) -> Occupation {
        self.ints.hf_occupation()
    }

    pub fn fci(&self) -> f64 {
        self.fci
    }

    /// Fresh evaluator with its own counter and cache.
    pub fn evaluator(&self) -> Result<EnergyEvaluator> {
        EnergyEvaluator::new(&self.hamiltonian, self.reference())
    }
}
