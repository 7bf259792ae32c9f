//! Constraint encodings for QAOA on 0/1 knapsack problems.
//!
//! Three ways of keeping a variational search inside `Σ wᵢxᵢ ≤ W` are
//! implemented and benchmarked against each other:
//!
//! * **QUBO** ([`qubo`]): slack qubits and a squared penalty folded into an
//!   Ising cost Hamiltonian.
//! * **Penalty dephasing** ([`encoding::dephasing_layer`]): QFT arithmetic
//!   ([`arith`]) computes the weight, flags overweight selections and phases
//!   them before uncomputing.
//! * **Quantum Zeno** ([`encoding::zeno_layer`]): the flag is measured
//!   non-selectively and reset every layer, confining the dynamics.
//!
//! Circuits are plain gate lists ([`circuit`]) executed by the simulators in
//! [`sim`]. [`optimizer`] tunes the angles, [`metrics`] scores the final
//! distribution against a brute-force oracle ([`knapsack`]), and [`harness`]
//! runs seeded sweeps and writes CSV and SVG reports.
//!
//! ```
//! use qaoa_constraints::encoding::{AnsatzParams, EncodingMethod};
//! use qaoa_constraints::knapsack::{brute_force, KnapsackInstance};
//! use qaoa_constraints::metrics::compute_metrics;
//! use qaoa_constraints::simulate::{Evaluator, Simulator};
//!
//! let inst = KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5).unwrap();
//! let oracle = brute_force(&inst).unwrap();
//! let sim = Simulator::new(&inst, &EncodingMethod::Zeno, Evaluator::Reduced).unwrap();
//! let dist = sim.data_distribution(&AnsatzParams::zeros(3).unwrap()).unwrap();
//! let metrics = compute_metrics(&dist, &oracle).unwrap();
//! assert!((metrics.feasibility_ratio - 1.0).abs() < 1e-12);
//! ```

pub mod arith;
pub mod circuit;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod harness;
pub mod knapsack;
pub mod metrics;
pub mod optimizer;
pub mod qubo;
pub mod reduced;
pub mod sim;
pub mod simulate;

pub use error::{Error, Result};
