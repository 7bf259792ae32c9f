//! End-to-end acceptance checks. Runs as a plain binary (`harness = false`)
//! so every criterion prints a PASS/FAIL line whether or not it fails:
//!
//! ```text
//! cargo test --release --test acceptance
//! ```
//!
//! Criteria 8–10 run the full benchmark protocol twice; the remaining
//! checks finish in seconds.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qaoa_constraints::arith::{adder, test_block, RegisterPlan};
use qaoa_constraints::circuit::{compose, run, CircuitProgram};
use qaoa_constraints::encoding::{
    build_ansatz, dephasing_layer, return_phase, AnsatzParams, EncodingMethod, MethodTag,
};
use qaoa_constraints::harness::{run_experiment, write_records, ExperimentConfig, RunRecord};
use qaoa_constraints::knapsack::{brute_force, generate, GeneratorParams, KnapsackInstance};
use qaoa_constraints::metrics::{compute_metrics, total_variation};
use qaoa_constraints::qubo::{build_qubo, qubo_phase_block, SlackConvention};
use qaoa_constraints::sim::{init_state, zeno_limit_check, Backend, QuantumState};
use qaoa_constraints::simulate::{Evaluator, Simulator};

type Outcome = Result<String, String>;

fn instance_a() -> KnapsackInstance {
    KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5).unwrap()
}

fn seeded_instances(count: usize, max_m: usize, salt: u64) -> Vec<KnapsackInstance> {
    (0..count)
        .map(|i| {
            let m = 1 + i % max_m;
            generate(salt * 1000 + i as u64, m, GeneratorParams::default()).unwrap()
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("runtime {:.1}s exceeds {limit_s}s", elapsed.as_secs_f64())
    })
}

fn amplitudes(state: &QuantumState) -> Vec<Complex64> {
    state.amplitudes().expect("pure state").to_vec()
}

fn basis_run(c: &CircuitProgram, index: usize) -> Vec<Complex64> {
    amplitudes(&run(c, QuantumState::basis(c.n_qubits(), index, Backend::StateVector).unwrap()).unwrap())
}

/// Sole basis state carrying (numerically) all the amplitude.
fn peak(amps: &[Complex64]) -> Result<usize, String> {
    let (idx, a) = amps
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
        .unwrap();
    ensure((a.norm() - 1.0).abs() < 1e-10, || format!("output is not a basis state (peak |a| = {})", a.norm()))?;
    Ok(idx)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let instances = seeded_instances(20, 4, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut inputs = 0;
    let mut worst_leak: f64 = 0.0;
    for inst in &instances {
        let plan = RegisterPlan::for_instance(inst);
        let oracle = brute_force(inst).unwrap();
        let add = adder(inst, &plan);
        let add_test = compose(&add, &test_block(inst.capacity(), &plan)).unwrap();
        let (gamma, beta) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let layer = dephasing_layer(inst, gamma, beta, 10_000.0, &plan);
        let data_mask = (1usize << inst.m()) - 1;
        for x in 0..1usize << inst.m() {
            let weight = oracle.weight_of(x);
            let got = peak(&basis_run(&add, x))?;
            ensure(got == plan.basis_index(x, weight, false), || {
                format!("{inst}: ADD on x={x} gave basis {got}, want weight {weight}")
            })?;
            let got = peak(&basis_run(&add_test, x))?;
            let want = plan.basis_index(x, weight, !oracle.is_feasible(x));
            ensure(got == want, || format!("{inst}: TEST flag wrong for x={x}"))?;
            let amps = basis_run(&layer, x);
            for (idx, a) in amps.iter().enumerate() {
                if idx & !data_mask != 0 {
                    worst_leak = worst_leak.max(a.norm());
                }
            }
            inputs += 1;
        }
    }
    ensure(worst_leak < 1e-10, || format!("ancilla amplitude {worst_leak:.2e} left after the layer"))?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{} instances, {inputs} basis inputs, max ancilla residue {worst_leak:.1e}, {:.2}s",
        instances.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let instances = seeded_instances(50, 5, 2);
    for inst in &instances {
        let oracle = brute_force(inst).unwrap();
        let model = build_qubo(inst, 2.0 * inst.total_value() as f64, SlackConvention::Exact).unwrap();
        let table = model.energy_table();
        let min = table.iter().copied().fold(f64::INFINITY, f64::min);
        ensure(min == -(oracle.best_value() as f64), || {
            format!("{inst}: min energy {min}, want -{}", oracle.best_value())
        })?;
        for (z, &e) in table.iter().enumerate() {
            if e == min {
                let x = model.data_mask(z);
                ensure(oracle.is_best(x), || format!("{inst}: ground state decodes to non-optimal x={x}"))?;
            }
        }
    }
    within(start.elapsed(), 120)?;
    Ok(format!("{} instances, m ≤ 5, {:.2}s", instances.len(), start.elapsed().as_secs_f64()))
}

/// `−Σvᵢxᵢ + P(Σwᵢxᵢ + Σₖ sₖcₖ − W)²` in integers, straight from the
/// assignment bits.
fn direct_cost(inst: &KnapsackInstance, slack_weights: &[u64], penalty: i64, z: usize) -> i64 {
    let m = inst.m();
    let bit = |k: usize| ((z >> k) & 1) as i64;
    let value: i64 = (0..m).map(|i| inst.values()[i] as i64 * bit(i)).sum();
    let weight: i64 = (0..m).map(|i| inst.weights()[i] as i64 * bit(i)).sum();
    let slack: i64 = slack_weights.iter().enumerate().map(|(k, &s)| s as i64 * bit(m + k)).sum();
    let excess = weight + slack - inst.capacity() as i64;
    -value + penalty * excess * excess
}

fn criterion_3() -> Outcome {
    let instances = seeded_instances(20, 4, 3);
    let mut checked = 0;
    for (k, inst) in instances.iter().enumerate() {
        let penalty = 1 + k as i64 % 7;
        for slack in [SlackConvention::Exact, SlackConvention::Paper] {
            let model = build_qubo(inst, penalty as f64, slack).unwrap();
            for z in 0..1usize << model.n_vars() {
                let want = direct_cost(inst, model.slack_weights(), penalty, z);
                let got = model.energy_of_index(z);
                ensure(got == want as f64, || format!("{inst}, P={penalty}, z={z}: {got} vs {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} assignments over 20 instances, both slack conventions, exact"))
}

fn uniform_state(n: usize, on: usize) -> Vec<Complex64> {
    let amp = Complex64::new(1.0 / ((1usize << on) as f64).sqrt(), 0.0);
    (0..1usize << n).map(|i| if i >> on == 0 { amp } else { Complex64::new(0.0, 0.0) }).collect()
}

fn phase_errors(c: &CircuitProgram, on: usize, expected: impl Fn(usize) -> f64) -> f64 {
    let input = uniform_state(c.n_qubits(), on);
    let out = amplitudes(&run(c, QuantumState::from_amplitudes(input.clone(), Backend::StateVector).unwrap()).unwrap());
    let global = out[0] / input[0] * Complex64::from_polar(1.0, -expected(0));
    (0..1usize << on)
        .map(|z| (out[z] / input[z] - global * Complex64::from_polar(1.0, expected(z))).norm())
        .chain(out.iter().skip(1 << on).map(|a| a.norm()))
        .fold(0.0, f64::max)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut models = 0;
    for i in 0..60u64 {
        let inst = generate(4000 + i, 1 + i as usize % 5, GeneratorParams::default()).unwrap();
        let gamma = rng.gen_range(-1.0..1.0);
        let model = build_qubo(&inst, rng.gen_range(0.5..4.0), SlackConvention::Exact).unwrap();
        if model.n_vars() <= 8 {
            let err = phase_errors(&qubo_phase_block(&model, gamma), model.n_vars(), |z| -gamma * model.energy_of_index(z));
            worst = worst.max(err);
            models += 1;
        }
        let plan = RegisterPlan::for_instance(&inst);
        let oracle = brute_force(&inst).unwrap();
        let err = phase_errors(&return_phase(&inst, gamma, &plan), inst.m(), |x| -gamma * oracle.value_of(x) as f64);
        worst = worst.max(err);
    }
    ensure(worst < 1e-9, || format!("phase error {worst:.2e}"))?;
    ensure(models >= 20, || format!("only {models} QUBO models with m + c ≤ 8"))?;
    Ok(format!("{models} QUBO phase blocks (m + c ≤ 8) and 60 return-phase blocks, max error {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut instances = vec![instance_a()];
    instances.extend(seeded_instances(6, 3, 5));
    for inst in &instances {
        let angles: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let params = AnsatzParams::from_flat(&angles).unwrap();
        let c = build_ansatz(inst, &EncodingMethod::dephasing(10_000.0), &params).unwrap();
        let data = c.layout().data.to_vec();
        let sv = run(&c, init_state(c.n_qubits(), &[], Backend::StateVector).unwrap()).unwrap();
        let dm = run(&c, init_state(c.n_qubits(), &[], Backend::DensityMatrix).unwrap()).unwrap();
        for (a, b) in sv.basis_probabilities().iter().zip(dm.basis_probabilities()) {
            worst = worst.max((a - b).abs());
        }
        for (a, b) in sv.probabilities(&data).unwrap().iter().zip(dm.probabilities(&data).unwrap()) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-10, || format!("statevector vs density-matrix deviation {worst:.2e}"))?;

    let inst = instance_a();
    let params = AnsatzParams::new(vec![0.4, 0.9, 0.2], vec![0.7, 0.3, 0.5]).unwrap();
    let density = Simulator::new(&inst, &EncodingMethod::Zeno, Evaluator::circuit(Backend::DensityMatrix))
        .unwrap()
        .data_distribution(&params)
        .unwrap();
    let trajectories = Simulator::new(
        &inst,
        &EncodingMethod::Zeno,
        Evaluator::Circuit {
            backend: Backend::Trajectory { seed: 20_000 },
            trajectories: 20_000,
        },
    )
    .unwrap()
    .data_distribution(&params)
    .unwrap();
    let tvd = total_variation(&density, &trajectories);
    ensure(tvd < 0.05, || format!("zeno trajectory TVD {tvd:.4}"))?;
    Ok(format!(
        "dephasing max deviation {worst:.1e} over {} instances; zeno 20000-trajectory TVD {tvd:.4}",
        instances.len()
    ))
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Orthogonal projector onto the span of `rank` random vectors.
fn random_projector(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, rank, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = a.qr().q();
    &q * q.adjoint()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_ratio, mut worst_abs): (f64, f64) = (0.0, 0.0);
    for pair in 0..20 {
        let dim = 2usize << (pair % 3);
        let rank = rng.gen_range(1..dim);
        let h = random_hermitian(&mut rng, dim);
        let p = random_projector(&mut rng, dim, rank);
        let e10 = zeno_limit_check(&h, &p, 1.0, 10).unwrap();
        let e1000 = zeno_limit_check(&h, &p, 1.0, 1000).unwrap();
        let e10k = zeno_limit_check(&h, &p, 1.0, 10_000).unwrap();
        worst_ratio = worst_ratio.max(e1000 / e10);
        worst_abs = worst_abs.max(e10k);
    }
    ensure(worst_ratio < 0.1, || format!("N=1000 / N=10 error ratio {worst_ratio:.3}"))?;
    ensure(worst_abs < 1e-2, || format!("N=10^4 error {worst_abs:.2e}"))?;
    Ok(format!(
        "20 pairs on 1–3 qubits: worst N=1000/N=10 ratio {worst_ratio:.4}, worst N=10^4 error {worst_abs:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let inst = instance_a();
    let oracle = brute_force(&inst).unwrap();
    let uniform_avg = oracle
        .feasible_set()
        .map(|x| oracle.value_of(x) as f64 / oracle.best_value() as f64)
        .sum::<f64>()
        / oracle.n_selections() as f64;
    let methods = [EncodingMethod::qubo(10.0), EncodingMethod::dephasing(10_000.0), EncodingMethod::Zeno];
    for method in &methods {
        for evaluator in [Evaluator::Reduced, Evaluator::circuit(Backend::DensityMatrix)] {
            for p in [1, 3] {
                let params = AnsatzParams::zeros(p).unwrap();
                let dist = Simulator::new(&inst, method, evaluator).unwrap().data_distribution(&params).unwrap();
                for (x, q) in dist.iter().enumerate() {
                    ensure((q - 0.125).abs() < 1e-12, || format!("{method}: P({x}) = {q}"))?;
                }
                let ms = compute_metrics(&dist, &oracle).unwrap();
                let want_pb = oracle.best_solutions().len() as f64 / 8.0;
                let v = ms.avg_performance.unwrap();
                ensure((ms.p_best - want_pb).abs() < 1e-12, || format!("{method}: P_B {}", ms.p_best))?;
                ensure((ms.feasibility_ratio - 1.0).abs() < 1e-12, || format!("{method}: F {}", ms.feasibility_ratio))?;
                ensure((v - uniform_avg).abs() < 1e-12, || format!("{method}: V {v} vs {uniform_avg}"))?;
            }
        }
    }
    ensure((uniform_avg - 0.477_272_727_272_727).abs() < 1e-12, || format!("uniform V̄ {uniform_avg}"))?;
    Ok(format!("all methods and evaluators uniform; P_B = 1/8, F = 1, V̄ = {uniform_avg:.5}"))
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn criterion_8(cfg: &ExperimentConfig, records: &[RunRecord], elapsed: Duration) -> Outcome {
    let (mut lines, mut violations) = (Vec::new(), Vec::new());
    for &m in &cfg.sizes {
        let baseline = mean((0..cfg.instances).map(|i| {
            let seed = qaoa_constraints::harness::instance_seed(cfg.seed, m, i);
            let oracle = brute_force(&generate(seed, m, cfg.generator).unwrap()).unwrap();
            qaoa_constraints::metrics::uniform_metrics(&oracle).avg_performance.unwrap_or(0.0)
        }));
        let guess = 0.5f64.powi(m as i32);
        for tag in MethodTag::ALL {
            let cell: Vec<&RunRecord> = records.iter().filter(|r| r.method == tag && r.m == m).collect();
            ensure(cell.len() == cfg.instances, || format!("{tag} m={m}: {} records", cell.len()))?;
            let v = mean(cell.iter().map(|r| r.avg_performance.unwrap_or(0.0)));
            let pb = mean(cell.iter().map(|r| r.p_best));
            if v <= baseline {
                violations.push(format!("{tag} m={m}: mean V̄ {v:.4} ≤ uniform {baseline:.4}"));
            }
            if pb <= guess {
                violations.push(format!("{tag} m={m}: mean P_B {pb:.4} ≤ 2^-m = {guess:.4}"));
            }
            lines.push(format!("{tag}/m{m} V̄ {v:.3} vs {baseline:.3}, P_B {pb:.4} vs {guess:.4}"));
        }
    }
    ensure(violations.is_empty(), || format!("{}; all cells: {}", violations.join("; "), lines.join(", ")))?;
    within(elapsed, 3600)?;
    Ok(format!("{:.0}s; {}", elapsed.as_secs_f64(), lines.join(", ")))
}

fn criterion_9(cfg: &ExperimentConfig, records: &[RunRecord]) -> Outcome {
    let per_size = |tag: MethodTag, f: fn(&RunRecord) -> usize| -> Vec<f64> {
        cfg.sizes
            .iter()
            .map(|&m| mean(records.iter().filter(|r| r.method == tag && r.m == m).map(|r| f(r) as f64)))
            .collect()
    };
    let mut summary = Vec::new();
    for tag in MethodTag::ALL {
        let gates = per_size(tag, |r| r.two_qubit_gates_per_layer);
        let ancilla = per_size(tag, |r| r.n_ancilla);
        for series in [&gates, &ancilla] {
            ensure(series.windows(2).all(|w| w[0] <= w[1]), || format!("{tag}: decreasing in m: {series:?}"))?;
        }
        summary.push(format!("{tag} gates {gates:.0?} ancilla {ancilla:.1?}"));
    }
    let qubo = per_size(MethodTag::Qubo, |r| r.n_ancilla);
    for tag in [MethodTag::Dephasing, MethodTag::Zeno] {
        let other = per_size(tag, |r| r.n_ancilla);
        ensure(qubo.iter().zip(&other).all(|(q, o)| q < o), || format!("qubo ancillas {qubo:?} vs {tag} {other:?}"))?;
    }
    Ok(summary.join("; "))
}

fn outcome_columns(records: &[RunRecord]) -> Vec<u8> {
    let masked: Vec<RunRecord> = records.iter().map(|r| RunRecord { wall_time_ms: 0.0, ..r.clone() }).collect();
    let mut out = Vec::new();
    write_records(&masked, &mut out).unwrap();
    out
}

fn criterion_10(cfg: &ExperimentConfig, first: &[RunRecord]) -> Outcome {
    let second = run_experiment(cfg).map_err(|e| e.to_string())?;
    let (a, b) = (outcome_columns(first), outcome_columns(&second));
    ensure(a == b, || {
        let diff = first.iter().zip(&second).filter(|(x, y)| !x.same_outcome(y)).count();
        format!("{diff} rows differ between reruns")
    })?;
    Ok(format!("{} rows, {} bytes of non-timing CSV identical", second.len(), a.len()))
}

fn report(id: usize, name: &str, outcome: Outcome, failures: &mut usize) {
    match outcome {
        Ok(detail) => println!("PASS criterion {id:>2} {name}: {detail}"),
        Err(detail) => {
            *failures += 1;
            println!("FAIL criterion {id:>2} {name}: {detail}");
        }
    }
}

fn main() -> ExitCode {
    let mut failures = 0;
    report(1, "arithmetic correctness", criterion_1(), &mut failures);
    report(2, "QUBO ground state", criterion_2(), &mut failures);
    report(3, "QUBO coefficients vs direct cost", criterion_3(), &mut failures);
    report(4, "phase-block diagonality", criterion_4(), &mut failures);
    report(5, "backend equivalence", criterion_5(), &mut failures);
    report(6, "Zeno limit", criterion_6(), &mut failures);
    report(7, "trivial angles", criterion_7(), &mut failures);

    let cfg = ExperimentConfig {
        seed: 2024,
        ..Default::default()
    };
    let start = Instant::now();
    match run_experiment(&cfg) {
        Ok(records) => {
            let elapsed = start.elapsed();
            report(8, "improvement over random guessing", criterion_8(&cfg, &records, elapsed), &mut failures);
            report(9, "resource trends", criterion_9(&cfg, &records), &mut failures);
            report(10, "determinism", criterion_10(&cfg, &records), &mut failures);
        }
        Err(e) => {
            for (id, name) in [(8, "improvement over random guessing"), (9, "resource trends"), (10, "determinism")] {
                report(id, name, Err(format!("sweep failed: {e}")), &mut failures);
            }
        }
    }

    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
