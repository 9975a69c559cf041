//! Dense statevector engine with direct qubit-excitation gates, plus the
//! counted energy evaluator used by every solver.

mod evaluator;
mod state;

pub use evaluator::{EnergyEvaluator, EvalCounter, CACHE_RESOLUTION};
pub use state::State;
