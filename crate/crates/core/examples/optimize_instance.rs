//! Optimize the QAOA angles of all three encodings on one instance and
//! compare the resulting metrics with random guessing.

use qaoa_constraints::encoding::{AnsatzParams, EncodingMethod};
use qaoa_constraints::knapsack::{brute_force, generate, GeneratorParams};
use qaoa_constraints::metrics::{compute_metrics, uniform_metrics};
use qaoa_constraints::optimizer::{make_objective, multistart, OptimizerOptions};
use qaoa_constraints::sim::Backend;
use qaoa_constraints::simulate::{Evaluator, Simulator};

fn main() -> qaoa_constraints::Result<()> {
    let (m, p) = (5, 3);
    let inst = generate(2024, m, GeneratorParams::default())?;
    let oracle = brute_force(&inst)?;
    println!("{inst}; optimum {}", oracle.best_value());

    let u = uniform_metrics(&oracle);
    println!(
        "{:<10} P_B {:.4}  F {:.3}  V {:.3}",
        "uniform",
        u.p_best,
        u.feasibility_ratio,
        u.avg_performance.unwrap_or(f64::NAN)
    );

    for method in [EncodingMethod::qubo(10.0), EncodingMethod::dephasing(10_000.0), EncodingMethod::Zeno] {
        let mut objective = make_objective(&inst, &method, Evaluator::Reduced, p, None, 1)?;
        let opts = OptimizerOptions { seed: 1, ..Default::default() };
        let trace = multistart(|theta: &[f64]| objective.evaluate(theta), 2 * p, 3, &opts)?;
        let params: AnsatzParams = trace.best_params()?;

        let backend = if method.needs_channels() { Backend::Ensemble } else { Backend::StateVector };
        let dist = Simulator::new(&inst, &method, Evaluator::circuit(backend))?.data_distribution(&params)?;
        let ms = compute_metrics(&dist, &oracle)?;
        println!(
            "{:<10} P_B {:.4}  F {:.3}  V {:.3}   objective {:.3} after {} evaluations",
            method.tag(),
            ms.p_best,
            ms.feasibility_ratio,
            ms.avg_performance.unwrap_or(f64::NAN),
            trace.best_value,
            trace.nfev
        );
    }
    Ok(())
}
