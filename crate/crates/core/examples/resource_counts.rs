//! Qubit and two-qubit-gate counts per layer for each encoding as the
//! problem grows, averaged over 20 generated instances per size (the
//! register widths depend on the weights and capacity).

use qaoa_constraints::circuit::count_resources;
use qaoa_constraints::encoding::{EncodingMethod, MethodTag};
use qaoa_constraints::knapsack::{generate, GeneratorParams};

const SAMPLES: u64 = 20;

fn main() -> qaoa_constraints::Result<()> {
    println!("{:<10} {:>2} {:>7} {:>8} {:>10}", "method", "m", "qubits", "ancilla", "CNOT/layer");
    for tag in MethodTag::ALL {
        let method = match tag {
            MethodTag::Qubo => EncodingMethod::qubo(10.0),
            MethodTag::Dephasing => EncodingMethod::dephasing(10_000.0),
            MethodTag::Zeno => EncodingMethod::Zeno,
        };
        for m in 3..=8 {
            let (mut qubits, mut ancilla, mut gates) = (0, 0, 0);
            for seed in 0..SAMPLES {
                let inst = generate(seed, m, GeneratorParams::default())?;
                let layer = method.layer(&inst, 1.0, 1.0)?;
                let r = count_resources(&layer, 1);
                qubits += layer.n_qubits();
                ancilla += r.n_ancilla_qubits;
                gates += r.two_qubit_gates_per_layer;
            }
            let mean = |x: usize| x as f64 / SAMPLES as f64;
            println!(
                "{:<10} {:>2} {:>7.1} {:>8.1} {:>10.1}",
                tag,
                m,
                mean(qubits),
                mean(ancilla),
                mean(gates)
            );
        }
    }
    Ok(())
}
