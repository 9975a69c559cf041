//! Adaptive variational eigensolvers on an exact statevector engine.
//!
//! The crate ingests molecular integrals, maps them to qubits with the
//! Jordan-Wigner transform and grows qubit-excitation ansätze from the
//! Hartree-Fock determinant. Three solver families share one counted energy
//! evaluator: ADAPT-VQE, QEB-ADAPT-VQE and the staged growth ladder
//! (levels L0 to L5) with per-molecule presets.

pub mod ansatz;
pub mod baselines;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod hamio;
pub mod ladder;
pub mod opt1d;
pub mod pools;
pub mod problem;
pub mod resources;
pub mod statevector;
mod util;

pub use ansatz::Ansatz;
pub use error::{Error, Result};
pub use problem::Problem;
pub use util::{pairwise_sum, wrap_angle};

/// Chemical precision, in Hartree.
pub const CHEMICAL_PRECISION: f64 = 1.6e-3;
