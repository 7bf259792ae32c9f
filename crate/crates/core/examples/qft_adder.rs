//! Fourier-space arithmetic: add the selected weights into an ancilla
//! register and flag selections that exceed the capacity.

use qaoa_constraints::arith::{adder, test_block, RegisterPlan};
use qaoa_constraints::circuit::{compose, count_resources, run};
use qaoa_constraints::knapsack::{selection_bitstring, KnapsackInstance};
use qaoa_constraints::sim::{Backend, QuantumState};

fn main() -> qaoa_constraints::Result<()> {
    let inst = KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5)?;
    let plan = RegisterPlan::for_instance(&inst);
    println!(
        "data qubits {:?}, weight register {:?}, flag {}",
        plan.data.qubits(),
        plan.weight_reg.qubits(),
        plan.flag
    );

    let circuit = compose(&adder(&inst, &plan), &test_block(inst.capacity(), &plan))?;
    let res = count_resources(&circuit, 1);
    println!("ADD + TEST: {} ops, {} CNOTs after decomposition", circuit.len(), res.two_qubit_gates_per_layer);

    let reg_mask = (1usize << plan.weight_reg.len) - 1;
    for x in 0..1usize << inst.m() {
        let input = QuantumState::basis(circuit.n_qubits(), x, Backend::StateVector)?;
        let out = run(&circuit, input)?;
        let probs = out.basis_probabilities();
        let (idx, p) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let weight = (idx >> plan.weight_reg.start) & reg_mask;
        let flag = (idx >> plan.flag) & 1;
        println!(
            "  {}  -> weight register {weight:>2}  overweight flag {flag}  (p = {p:.12})",
            selection_bitstring(x, inst.m())
        );
    }
    Ok(())
}
