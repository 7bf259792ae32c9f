//! A penalty-dephasing ansatz simulated on the statevector and density-matrix
//! backends, showing that both agree and that ancillas are uncomputed.

use qaoa_constraints::circuit::run;
use qaoa_constraints::encoding::{build_ansatz, AnsatzParams, EncodingMethod};
use qaoa_constraints::knapsack::{selection_bitstring, KnapsackInstance};
use qaoa_constraints::sim::{init_state, Backend};

fn main() -> qaoa_constraints::Result<()> {
    let inst = KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5)?;
    let params = AnsatzParams::new(vec![0.35, 0.8], vec![0.6, 0.25])?;
    let circuit = build_ansatz(&inst, &EncodingMethod::dephasing(4.0), &params)?;
    println!(
        "{} qubits, {} ops, {} adder blocks",
        circuit.n_qubits(),
        circuit.len(),
        circuit.count_blocks("adder", false)
    );

    let data = circuit.layout().data.to_vec();
    let ancillas: Vec<usize> = (data.len()..circuit.n_qubits()).collect();
    let sv = run(&circuit, init_state(circuit.n_qubits(), &[], Backend::StateVector)?)?;
    let dm = run(&circuit, init_state(circuit.n_qubits(), &[], Backend::DensityMatrix)?)?;
    let (p_sv, p_dm) = (sv.probabilities(&data)?, dm.probabilities(&data)?);
    for x in 0..p_sv.len() {
        let feasible = inst.evaluate_mask(x).feasible;
        println!(
            "  {}  {:.6}  {:.6}{}",
            selection_bitstring(x, inst.m()),
            p_sv[x],
            p_dm[x],
            if feasible { "" } else { "  (overweight)" }
        );
    }
    println!("ancillas back in |0…0⟩ with probability {:.12}", sv.probabilities(&ancillas)?[0]);
    Ok(())
}
