//! Build the penalized QUBO for a small instance, inspect its coefficients,
//! and confirm that the energy minimum decodes to the knapsack optimum.

use qaoa_constraints::knapsack::{brute_force, selection_bitstring, KnapsackInstance};
use qaoa_constraints::qubo::{build_qubo, SlackConvention};

fn main() -> qaoa_constraints::Result<()> {
    let inst = KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5)?;
    let penalty = 2.0 * inst.total_value() as f64;
    let model = build_qubo(&inst, penalty, SlackConvention::Exact)?;

    println!("{inst}, P = {penalty}");
    println!("{} data + {} slack variables, slack weights {:?}", model.m(), model.c(), model.slack_weights());
    println!("fields B: {:?}", model.fields());
    for (a, b, q) in model.nonzero_couplings().take(6) {
        println!("  Q[{a},{b}] = {q}");
    }
    println!("offset = {}", model.offset());

    let (j, h, constant) = model.to_spin();
    let couplings = j.iter().filter(|&&x| x != 0.0).count();
    println!("spin form: {} fields, {couplings} couplings, constant {constant}", h.len());

    let table = model.energy_table();
    let (z, e) = table
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let oracle = brute_force(&inst)?;
    println!(
        "ground state: data {} slack {} energy {e}; oracle optimum {}",
        selection_bitstring(model.data_mask(z), inst.m()),
        model.slack_value(z),
        oracle.best_value()
    );
    Ok(())
}
