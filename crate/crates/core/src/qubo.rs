//! Quadratization of the knapsack constraint: slack bits, the QUBO cost
//! `f = −Σ vᵢxᵢ + P(Σ wᵢxᵢ + Σ sₖcₖ − W)²`, its coupling/field form and the
//! corresponding QAOA layer.
//!
//! Variables are ordered data items first, then slack bits; variable `a`
//! is qubit `a` and bit `a` of an assignment index.

use std::fmt::Write as _;

use crate::circuit::{CircuitProgram, RegisterLayout, Span};
use crate::encoding::{mixer, AnsatzParams};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::sim::GateOp;

/// How slack bits are sized and weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SlackConvention {
    /// `c = ⌈log₂(W+1)⌉` bits weighted `2^0 … 2^(c−1)`; every slack value in
    /// `0..=W` is representable.
    #[default]
    Exact,
    /// `c = ⌈log₂W⌉ + 1` bits weighted `2^1 … 2^c`, the literal index
    /// arithmetic of the published coupling and field formulas.
    Paper,
}

impl SlackConvention {
    pub fn slack_weights(&self, capacity: u64) -> Vec<u64> {
        match self {
            SlackConvention::Exact => {
                let c = ceil_log2(capacity + 1);
                (0..c).map(|k| 1u64 << k).collect()
            }
            SlackConvention::Paper => {
                let c = ceil_log2(capacity) + 1;
                (1..=c).map(|k| 1u64 << k).collect()
            }
        }
    }
}

/// `⌈log₂ x⌉` for `x >= 1`.
pub(crate) fn ceil_log2(x: u64) -> usize {
    debug_assert!(x >= 1);
    (u64::BITS - (x - 1).leading_zeros()) as usize
}

/// Binary quadratic model `E(z) = Σ_{a<b} Q_ab z_a z_b + Σ_a B_a z_a + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    m: usize,
    slack_weights: Vec<u64>,
    penalty: f64,
    offset: f64,
    fields: Vec<f64>,
    /// Row-major `n x n`, only `a < b` entries are used.
    couplings: Vec<f64>,
}

/// Builds the QUBO model of `inst` with penalty weight `penalty`.
pub fn build_qubo(
    inst: &KnapsackInstance,
    penalty: f64,
    convention: SlackConvention,
) -> Result<IsingModel> {
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(Error::Validation(format!("penalty {penalty} must be > 0")));
    }
    let m = inst.m();
    let slack_weights = convention.slack_weights(inst.capacity());
    // coefficient of every variable inside the squared constraint
    let coeffs: Vec<f64> = inst
        .weights()
        .iter()
        .chain(&slack_weights)
        .map(|&u| u as f64)
        .collect();
    let n = coeffs.len();
    let cap = inst.capacity() as f64;

    let mut fields = vec![0.0; n];
    let mut couplings = vec![0.0; n * n];
    for a in 0..n {
        let value = if a < m { inst.values()[a] as f64 } else { 0.0 };
        fields[a] = -value + penalty * (coeffs[a] * coeffs[a] - 2.0 * cap * coeffs[a]);
        for b in a + 1..n {
            couplings[a * n + b] = 2.0 * coeffs[a] * coeffs[b] * penalty;
        }
    }
    Ok(IsingModel {
        m,
        slack_weights,
        penalty,
        offset: penalty * cap * cap,
        fields,
        couplings,
    })
}

impl IsingModel {
    /// Data variable count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Slack variable count.
    pub fn c(&self) -> usize {
        self.slack_weights.len()
    }

    pub fn n_vars(&self) -> usize {
        self.fields.len()
    }

    pub fn slack_weights(&self) -> &[u64] {
        &self.slack_weights
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn field(&self, a: usize) -> f64 {
        self.fields[a]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// `Q_ab` for `a < b`; symmetric access.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if a == b {
            return 0.0;
        }
        self.couplings[a * self.n_vars() + b]
    }

    /// Non-zero couplings as `(a, b, Q_ab)` with `a < b`.
    pub fn nonzero_couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_vars();
        (0..n)
            .flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
            .map(move |(a, b)| (a, b, self.couplings[a * n + b]))
            .filter(|&(_, _, q)| q != 0.0)
    }

    /// Energy of the assignment whose bit `a` is variable `a`.
    pub fn energy_of_index(&self, z: usize) -> f64 {
        let n = self.n_vars();
        let mut e = self.offset;
        for a in (0..n).filter(|a| (z >> a) & 1 == 1) {
            e += self.fields[a];
            for b in (a + 1..n).filter(|b| (z >> b) & 1 == 1) {
                e += self.couplings[a * n + b];
            }
        }
        e
    }

    /// Energies of all `2^(m+c)` assignments, indexed like [`energy_of_index`].
    ///
    /// [`energy_of_index`]: IsingModel::energy_of_index
    pub fn energy_table(&self) -> Vec<f64> {
        let n = self.n_vars();
        let size = 1usize << n;
        let mut table = vec![0.0; size];
        table[0] = self.offset;
        // E(z) = E(z without its top bit a) + B_a + Σ_{b<a in z} Q_ba
        for z in 1..size {
            let a = usize::BITS as usize - 1 - z.leading_zeros() as usize;
            let rest = z & !(1 << a);
            let mut e = table[rest] + self.fields[a];
            for b in (0..a).filter(|b| (rest >> b) & 1 == 1) {
                e += self.couplings[b * n + a];
            }
            table[z] = e;
        }
        table
    }

    /// Energy of an assignment string: `m` item characters then `c` slack
    /// characters, slack bit `k` (weight `slack_weights[k]`) at position `m + k`.
    pub fn ising_energy(&self, assignment: &str) -> Result<f64> {
        let n = self.n_vars();
        if assignment.len() != n {
            return Err(Error::Validation(format!(
                "assignment {assignment:?} has length {}, expected {n}",
                assignment.len()
            )));
        }
        let z = crate::knapsack::parse_selection(assignment, n)?;
        Ok(self.energy_of_index(z))
    }

    /// Data-register selection mask of an assignment index.
    pub fn data_mask(&self, z: usize) -> usize {
        z & ((1usize << self.m) - 1)
    }

    /// Integer slack value encoded by an assignment index.
    pub fn slack_value(&self, z: usize) -> u64 {
        self.slack_weights
            .iter()
            .enumerate()
            .filter(|(k, _)| (z >> (self.m + k)) & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    /// Spin form under `xₐ = (1 + sₐ)/2`, `sₐ ∈ {−1, +1}`:
    /// returns `(J, h, constant)` with `E = Σ_{a<b} J_ab s_a s_b + Σ h_a s_a + constant`.
    pub fn to_spin(&self) -> (Vec<f64>, Vec<f64>, f64) {
        let n = self.n_vars();
        let mut j = vec![0.0; n * n];
        let mut h: Vec<f64> = self.fields.iter().map(|b| b / 2.0).collect();
        let mut constant = self.offset + self.fields.iter().sum::<f64>() / 2.0;
        for (a, b, q) in self.nonzero_couplings() {
            j[a * n + b] = q / 4.0;
            h[a] += q / 4.0;
            h[b] += q / 4.0;
            constant += q / 4.0;
        }
        (j, h, constant)
    }

    /// Text export: `m c P offset`, then `i j Q_ij` lines for non-zero
    /// couplings, then `i B_i` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.m, self.c(), self.penalty, self.offset);
        for (a, b, q) in self.nonzero_couplings() {
            let _ = writeln!(out, "{a} {b} {q}");
        }
        for (a, f) in self.fields.iter().enumerate() {
            let _ = writeln!(out, "{a} {f}");
        }
        out
    }

    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout {
            data: Span::new(0, self.m),
            ancilla: Span::new(self.m, self.c()),
            flag: None,
        }
    }

    pub fn empty_circuit(&self) -> CircuitProgram {
        CircuitProgram::new(self.n_vars(), self.layout()).expect("qubo layout is valid")
    }
}

/// `exp(−iγ H'_C)` up to global phase: `Phase(−γ B_a)` on every variable and
/// `CPhase(−γ Q_ab)` on every non-zero coupling.
pub fn qubo_phase_block(model: &IsingModel, gamma: f64) -> CircuitProgram {
    let mut c = model.empty_circuit();
    for (a, &b) in model.fields().iter().enumerate() {
        if b != 0.0 {
            c.push(GateOp::Phase(a, -gamma * b)).expect("in range");
        }
    }
    for (a, b, q) in model.nonzero_couplings() {
        c.push(GateOp::CPhase(a, b, -gamma * q)).expect("in range");
    }
    c.labeled("cost")
}

/// Phase block followed by `RX(2β)` on all `m + c` qubits.
pub fn qubo_layer(model: &IsingModel, gamma: f64, beta: f64) -> CircuitProgram {
    let mut layer = qubo_phase_block(model, gamma);
    let all = Span::new(0, model.n_vars());
    layer
        .append(&mixer(&model.empty_circuit(), all, beta))
        .expect("same layout");
    layer
}

/// Hadamards on every variable qubit, then one [`qubo_layer`] per `(γ_k, β_k)`.
pub fn qubo_ansatz_for_model(model: &IsingModel, params: &AnsatzParams) -> CircuitProgram {
    let mut c = model.empty_circuit();
    for q in 0..model.n_vars() {
        c.push(GateOp::H(q)).expect("in range");
    }
    let mut c = c.labeled("init");
    for (&g, &b) in params.gammas().iter().zip(params.betas()) {
        c.append(&qubo_layer(model, g, b).labeled("layer"))
            .expect("same layout");
    }
    c
}

pub fn qubo_ansatz(
    inst: &KnapsackInstance,
    penalty: f64,
    params: &AnsatzParams,
) -> Result<CircuitProgram> {
    let model = build_qubo(inst, penalty, SlackConvention::Exact)?;
    Ok(qubo_ansatz_for_model(&model, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::run;
    use crate::knapsack::{brute_force, generate, GeneratorParams};
    use crate::sim::{Backend, QuantumState};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn instance_a() -> KnapsackInstance {
        KnapsackInstance::new(vec![1, 2, 3], vec![6, 10, 12], 5).unwrap()
    }

    /// Direct evaluation of the penalized cost, independent of Q/B.
    fn direct_cost(inst: &KnapsackInstance, slack: &[u64], p: f64, z: usize) -> f64 {
        let m = inst.m();
        let mut value = 0.0;
        let mut load = 0.0;
        for i in 0..m {
            if (z >> i) & 1 == 1 {
                value += inst.values()[i] as f64;
                load += inst.weights()[i] as f64;
            }
        }
        for (k, &s) in slack.iter().enumerate() {
            if (z >> (m + k)) & 1 == 1 {
                load += s as f64;
            }
        }
        let r = load - inst.capacity() as f64;
        -value + p * r * r
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(6), 3);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
    }

    #[test]
    fn slack_conventions() {
        assert_eq!(SlackConvention::Exact.slack_weights(5), vec![1, 2, 4]);
        assert_eq!(SlackConvention::Exact.slack_weights(7), vec![1, 2, 4]);
        assert_eq!(SlackConvention::Exact.slack_weights(8), vec![1, 2, 4, 8]);
        assert_eq!(SlackConvention::Paper.slack_weights(5), vec![2, 4, 8, 16]);
    }

    #[test]
    fn instance_a_coefficients() {
        let model = build_qubo(&instance_a(), 10.0, SlackConvention::Exact).unwrap();
        assert_eq!(model.c(), 3);
        assert_eq!(model.field(0), -96.0);
        assert_eq!(model.coupling(0, 1), 40.0);
        assert_eq!(model.coupling(1, 0), 40.0);
        assert_eq!(model.offset(), 250.0);
    }

    #[test]
    fn paper_convention_matches_literal_formulas() {
        // Q_ij = 2^(i+j−2m+1) P and B_i = P[4^(i−m) − W·2^(i−m+1)] for slack i, j (1-based)
        let inst = instance_a();
        let p = 10.0;
        let model = build_qubo(&inst, p, SlackConvention::Paper).unwrap();
        let m = inst.m();
        let w = inst.capacity() as f64;
        for i in m + 1..=m + model.c() {
            let k = (i - m) as i32;
            assert_eq!(model.field(i - 1), p * (4f64.powi(k) - w * 2f64.powi(k + 1)));
            for j in i + 1..=m + model.c() {
                let e = (i + j) as i32 - 2 * m as i32 + 1;
                assert_eq!(model.coupling(i - 1, j - 1), 2f64.powi(e) * p);
            }
            for d in 1..=m {
                let e = k + 1;
                assert_eq!(
                    model.coupling(d - 1, i - 1),
                    inst.weights()[d - 1] as f64 * 2f64.powi(e) * p
                );
            }
        }
    }

    #[test]
    fn energy_examples() {
        let inst = instance_a();
        let model = build_qubo(&inst, 10.0, SlackConvention::Exact).unwrap();
        assert_eq!(model.ising_energy("000000").unwrap(), 10.0 * 25.0);
        assert_eq!(model.ising_energy("011000").unwrap(), -22.0);
        // empty selection with slack = 5 = 1 + 4 meets the constraint
        assert_eq!(model.ising_energy("000101").unwrap(), 0.0);
        assert!(model.ising_energy("0110").is_err());
    }

    #[test]
    fn energy_table_matches_pointwise() {
        let inst = generate(9, 4, GeneratorParams::default()).unwrap();
        let model = build_qubo(&inst, 7.0, SlackConvention::Exact).unwrap();
        for (z, &e) in model.energy_table().iter().enumerate() {
            assert_eq!(e, model.energy_of_index(z));
        }
    }

    #[test]
    fn ground_state_decodes_to_optimum() {
        for seed in 0..10 {
            let inst = generate(seed, 4, GeneratorParams::default()).unwrap();
            let oracle = brute_force(&inst).unwrap();
            let p = 2.0 * inst.total_value() as f64;
            let model = build_qubo(&inst, p, SlackConvention::Exact).unwrap();
            let table = model.energy_table();
            let (argmin, &emin) = table
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            assert_eq!(emin, -(oracle.best_value() as f64));
            assert!(oracle.is_best(model.data_mask(argmin)));
        }
    }

    #[test]
    fn spin_form_is_equivalent() {
        let inst = generate(4, 4, GeneratorParams::default()).unwrap();
        let model = build_qubo(&inst, 10.0, SlackConvention::Exact).unwrap();
        let (j, h, constant) = model.to_spin();
        let n = model.n_vars();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let z: usize = rng.gen_range(0..1usize << n);
            let s: Vec<f64> = (0..n).map(|a| if (z >> a) & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let mut e = constant;
            for a in 0..n {
                e += h[a] * s[a];
                for b in a + 1..n {
                    e += j[a * n + b] * s[a] * s[b];
                }
            }
            assert!((e - model.energy_of_index(z)).abs() < 1e-9);
        }
    }

    #[test]
    fn export_format() {
        let model = build_qubo(&instance_a(), 10.0, SlackConvention::Exact).unwrap();
        let text = model.to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("3 3 10 250"));
        assert_eq!(lines.next(), Some("0 1 40"));
        assert_eq!(text.lines().count(), 1 + 15 + 6);
        assert!(text.contains("\n0 -96\n"));
    }

    #[test]
    fn zero_angles_are_identity() {
        let model = build_qubo(&instance_a(), 10.0, SlackConvention::Exact).unwrap();
        let layer = qubo_layer(&model, 0.0, 0.0);
        for z in [0usize, 5, 37, 63] {
            let s = QuantumState::basis(6, z, Backend::StateVector).unwrap();
            let out = run(&layer, s).unwrap();
            assert!((out.amplitudes().unwrap()[z].norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mixer_at_half_pi_flips_everything() {
        let model = build_qubo(&instance_a(), 10.0, SlackConvention::Exact).unwrap();
        let layer = qubo_layer(&model, 0.0, std::f64::consts::FRAC_PI_2);
        let out = run(&layer, QuantumState::basis(6, 0, Backend::StateVector).unwrap()).unwrap();
        assert!((out.probabilities(&(0..6).collect::<Vec<_>>()).unwrap()[63] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ansatz_structure() {
        let params = AnsatzParams::new(vec![0.0; 3], vec![0.0; 3]).unwrap();
        let c = qubo_ansatz(&instance_a(), 10.0, &params).unwrap();
        assert_eq!(c.count_blocks("layer", false), 3);
        let out = run(&c, QuantumState::basis(6, 0, Backend::StateVector).unwrap()).unwrap();
        let probs = out.probabilities(&(0..6).collect::<Vec<_>>()).unwrap();
        assert!(probs.iter().all(|p| (p - 1.0 / 64.0).abs() < 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn model_energy_equals_direct_cost(seed in any::<u64>(), m in 1usize..5, p in 1u32..50) {
            let inst = generate(seed, m, GeneratorParams::default()).unwrap();
            let model = build_qubo(&inst, p as f64, SlackConvention::Exact).unwrap();
            for z in 0..1usize << model.n_vars() {
                prop_assert_eq!(model.energy_of_index(z), direct_cost(&inst, model.slack_weights(), p as f64, z));
            }
        }
    }
}
