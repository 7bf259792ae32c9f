//! Zeno-encoded ansatz with mid-circuit measure-and-reset, simulated exactly
//! (branch ensemble, density matrix) and by sampled trajectories, plus a
//! numerical check of the Zeno limit for a random two-qubit Hamiltonian.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qaoa_constraints::encoding::{AnsatzParams, EncodingMethod};
use qaoa_constraints::knapsack::KnapsackInstance;
use qaoa_constraints::metrics::total_variation;
use qaoa_constraints::sim::{zeno_limit_check, Backend};
use qaoa_constraints::simulate::{Evaluator, Simulator};

fn main() -> qaoa_constraints::Result<()> {
    let inst = KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5)?;
    let params = AnsatzParams::new(vec![0.4, 0.9], vec![0.7, 0.3])?;
    let zeno = EncodingMethod::Zeno;

    let exact = Simulator::new(&inst, &zeno, Evaluator::circuit(Backend::Ensemble))?.data_distribution(&params)?;
    let density = Simulator::new(&inst, &zeno, Evaluator::circuit(Backend::DensityMatrix))?.data_distribution(&params)?;
    let sampled = Simulator::new(
        &inst,
        &zeno,
        Evaluator::Circuit {
            backend: Backend::Trajectory { seed: 11 },
            trajectories: 2000,
        },
    )?
    .data_distribution(&params)?;
    println!("ensemble vs density TVD:      {:.2e}", total_variation(&exact, &density));
    println!("ensemble vs 2000 trajectories: {:.4}", total_variation(&exact, &sampled));

    // H = X⊗X + 0.5·X⊗I, P projects onto the even-parity subspace; the second
    // term leaks out of it, so the bound is approached only as N grows.
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).map(|v: f64| Complex64::new(v, 0.0));
    let id = DMatrix::<Complex64>::identity(2, 2);
    let h = x.kronecker(&x) + x.kronecker(&id) * Complex64::new(0.5, 0.0);
    let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        [1.0, 0.0, 0.0, 1.0].iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    ));
    for n in [10, 100, 1000, 10_000] {
        println!("N = {n:>5}: ‖[P e^(-iHt/N) P]^N − P e^(-iPHPt)‖ = {:.3e}", zeno_limit_check(&h, &p, 1.0, n)?);
    }
    Ok(())
}
