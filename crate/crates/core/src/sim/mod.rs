//! Exact simulation of qubit registers: statevector, density-matrix,
//! single-trajectory and pure-branch ensemble backends.
//!
//! Qubit 0 is the least-significant bit of a basis-state index. Register
//! values handed out by [`QuantumState::probabilities`] use the same rule
//! relative to the register list, and rendered bitstrings put the
//! most-significant position first.

mod gate;
pub(crate) mod kernel;
mod state;
pub mod zeno;

pub use gate::{GateOp, QubitIndex};
pub use state::{init_state, render_bits, Backend, QuantumState};
pub use zeno::zeno_limit_check;
