//! Integral ingestion, the Jordan-Wigner transform and mean-field helpers.

mod integrals;
mod jw;
mod meanfield;
mod pauli;

pub use integrals::{bond_label, load_integrals, IntegralFile, IntegralSet, Occupation, TwoBodyTerm, FORMAT_VERSION};
pub use jw::{jw_transform, IMAG_TOL, PRUNE_TOL};
pub use meanfield::{antisymmetrized, fermionic_sign, hf_energy, mp2_amplitude, Mp2Amplitude, DEGENERATE_DENOMINATOR};
pub use pauli::{Pauli, PauliHamiltonian, PauliString};
