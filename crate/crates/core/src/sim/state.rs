use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gate::{GateOp, QubitIndex};
use super::kernel;
use crate::error::{Error, Result};

/// Branches whose squared norm falls below this are dropped by the ensemble
/// backend after a measurement split.
const BRANCH_CUTOFF: f64 = 1e-30;

/// Simulation backend of a [`QuantumState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Dense pure state. Rejects measurement channels.
    StateVector,
    /// Dense `2^n x 2^n` density matrix; channels applied exactly.
    DensityMatrix,
    /// One pure-state trajectory; measurements sample a branch from `seed`.
    Trajectory { seed: u64 },
    /// Exact mixed state stored as a list of unnormalized pure branches
    /// `ρ = Σ_k |ψ_k⟩⟨ψ_k|`. Each measurement at most doubles the branch count.
    Ensemble,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::StateVector => "statevector",
            Backend::DensityMatrix => "density-matrix",
            Backend::Trajectory { .. } => "trajectory",
            Backend::Ensemble => "ensemble",
        }
    }

    pub fn supports_channels(&self) -> bool {
        !matches!(self, Backend::StateVector)
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Pure(Vec<Complex64>),
    /// Row-major; entry `(r, c)` lives at `(r << n) | c`.
    Density(Vec<Complex64>),
    Trajectory { amps: Vec<Complex64>, rng: Box<ChaCha8Rng> },
    Ensemble(Vec<Vec<Complex64>>),
}

/// State of an `n`-qubit register under one of the [`Backend`]s.
#[derive(Debug, Clone)]
pub struct QuantumState {
    n_qubits: usize,
    backend: Backend,
    repr: Repr,
}

/// `|0…0⟩` with a Hadamard on every listed qubit.
pub fn init_state(
    n_qubits: usize,
    hadamard_on: &[QubitIndex],
    backend: Backend,
) -> Result<QuantumState> {
    if n_qubits == 0 {
        return Err(Error::Validation("a state needs at least one qubit".into()));
    }
    let mut amps = basis_vector(n_qubits, 0);
    for &q in hadamard_on {
        let h = GateOp::H(q);
        h.validate(n_qubits)?;
        kernel::apply_unitary(&mut amps, &h);
    }
    QuantumState::from_amplitudes(amps, backend)
}

fn basis_vector(n_qubits: usize, index: usize) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n_qubits];
    amps[index] = Complex64::new(1.0, 0.0);
    amps
}

fn register_value(index: usize, register: &[QubitIndex]) -> usize {
    register
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((index >> q) & 1) << j))
}

/// Renders a register value most-significant position first.
pub fn render_bits(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|j| if (value >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl QuantumState {
    /// Builds a state from pure amplitudes. The vector length must be a power
    /// of two and its norm 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>, backend: Backend) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Validation(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("state norm {norm} is not 1")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        let repr = match backend {
            Backend::StateVector => Repr::Pure(amps),
            Backend::DensityMatrix => {
                let mut rho = vec![Complex64::new(0.0, 0.0); len * len];
                for (r, a) in amps.iter().enumerate() {
                    for (c, b) in amps.iter().enumerate() {
                        rho[(r << n_qubits) | c] = a * b.conj();
                    }
                }
                Repr::Density(rho)
            }
            Backend::Trajectory { seed } => Repr::Trajectory {
                amps,
                rng: Box::new(ChaCha8Rng::seed_from_u64(seed)),
            },
            Backend::Ensemble => Repr::Ensemble(vec![amps]),
        };
        Ok(Self {
            n_qubits,
            backend,
            repr,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize, backend: Backend) -> Result<Self> {
        if n_qubits == 0 || index >> n_qubits != 0 {
            return Err(Error::Validation(format!(
                "basis index {index} invalid for {n_qubits} qubits"
            )));
        }
        Self::from_amplitudes(basis_vector(n_qubits, index), backend)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Pure amplitudes for the statevector and trajectory backends.
    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Pure(a) | Repr::Trajectory { amps: a, .. } => Some(a),
            _ => None,
        }
    }

    /// Number of pure branches held by the ensemble backend (1 for pure states).
    pub fn branch_count(&self) -> usize {
        match &self.repr {
            Repr::Ensemble(b) => b.len(),
            Repr::Density(_) => 0,
            _ => 1,
        }
    }

    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if gate.is_measurement() {
            return Err(Error::ContractViolation(
                "apply_gate called with MeasureReset; use measure_and_reset".into(),
            ));
        }
        match &mut self.repr {
            Repr::Pure(a) | Repr::Trajectory { amps: a, .. } => kernel::apply_unitary(a, gate),
            Repr::Density(rho) => {
                // ρ → UρU†: U on the row bits, conj(U) on the column bits
                kernel::apply_unitary(rho, &gate.shifted(self.n_qubits));
                kernel::apply_unitary(rho, &gate.conjugate());
            }
            Repr::Ensemble(branches) => {
                for b in branches.iter_mut() {
                    kernel::apply_unitary(b, gate);
                }
            }
        }
        Ok(())
    }

    /// Non-selective measurement of `q` followed by reset of `q` to `|0⟩`.
    pub fn measure_and_reset(&mut self, q: QubitIndex) -> Result<()> {
        GateOp::MeasureReset(q).validate(self.n_qubits)?;
        let n = self.n_qubits;
        match &mut self.repr {
            Repr::Pure(_) => {
                return Err(Error::UnsupportedChannel {
                    backend: Backend::StateVector.name(),
                })
            }
            Repr::Density(rho) => {
                let row = 1usize << (q + n);
                let col = 1usize << q;
                let zero = Complex64::new(0.0, 0.0);
                for i in 0..rho.len() {
                    match (i & row != 0, i & col != 0) {
                        (false, false) => {
                            let moved = rho[i | row | col];
                            rho[i] += moved;
                        }
                        _ => rho[i] = zero,
                    }
                }
            }
            Repr::Trajectory { amps, rng } => {
                let p1 = kernel::prob_one(amps, q);
                let outcome = rng.gen::<f64>() < p1;
                kernel::project(amps, q, outcome, true);
                let scale = 1.0 / if outcome { p1 } else { 1.0 - p1 }.sqrt();
                amps.iter_mut().for_each(|a| *a *= scale);
            }
            Repr::Ensemble(branches) => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches.drain(..) {
                    let p1 = kernel::prob_one(&b, q);
                    let total: f64 = b.iter().map(|a| a.norm_sqr()).sum();
                    let p0 = total - p1;
                    match (p0 > BRANCH_CUTOFF, p1 > BRANCH_CUTOFF) {
                        (true, true) => {
                            let mut one = b.clone();
                            kernel::project(&mut one, q, true, true);
                            let mut zero = b;
                            kernel::project(&mut zero, q, false, true);
                            next.push(zero);
                            next.push(one);
                        }
                        (true, false) | (false, true) => {
                            let mut only = b;
                            kernel::project(&mut only, q, p1 > BRANCH_CUTOFF, true);
                            next.push(only);
                        }
                        (false, false) => {}
                    }
                }
                *branches = next;
            }
        }
        Ok(())
    }

    /// Applies a gate or channel.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        match *op {
            GateOp::MeasureReset(q) => self.measure_and_reset(q),
            _ => self.apply_gate(op),
        }
    }

    /// Diagonal of the density matrix (Born probabilities of every basis state).
    pub fn basis_probabilities(&self) -> Vec<f64> {
        let dim = 1usize << self.n_qubits;
        match &self.repr {
            Repr::Pure(a) | Repr::Trajectory { amps: a, .. } => {
                a.iter().map(|x| x.norm_sqr()).collect()
            }
            Repr::Density(rho) => (0..dim).map(|i| rho[(i << self.n_qubits) | i].re).collect(),
            Repr::Ensemble(branches) => {
                let mut p = vec![0.0; dim];
                for b in branches {
                    for (pi, a) in p.iter_mut().zip(b) {
                        *pi += a.norm_sqr();
                    }
                }
                p
            }
        }
    }

    fn check_register(&self, register: &[QubitIndex]) -> Result<()> {
        if register.is_empty() {
            return Err(Error::Validation("register must be non-empty".into()));
        }
        for (i, &q) in register.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if register[..i].contains(&q) {
                return Err(Error::Validation(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    /// Marginal Born distribution over `register`, indexed by register value
    /// (`register[j]` is bit `j`).
    pub fn probabilities(&self, register: &[QubitIndex]) -> Result<Vec<f64>> {
        self.check_register(register)?;
        let full = self.basis_probabilities();
        let contiguous = register.windows(2).all(|w| w[1] == w[0] + 1);
        let mut out = vec![0.0; 1usize << register.len()];
        if contiguous {
            let (start, mask) = (register[0], out.len() - 1);
            for (i, p) in full.iter().enumerate() {
                out[(i >> start) & mask] += p;
            }
        } else {
            for (i, p) in full.iter().enumerate() {
                out[register_value(i, register)] += p;
            }
        }
        Ok(out)
    }

    /// Same as [`probabilities`](Self::probabilities) keyed by bitstrings
    /// rendered most-significant register position first.
    pub fn bitstring_probabilities(
        &self,
        register: &[QubitIndex],
    ) -> Result<BTreeMap<String, f64>> {
        let probs = self.probabilities(register)?;
        Ok(probs
            .into_iter()
            .enumerate()
            .map(|(v, p)| (render_bits(v, register.len()), p))
            .collect())
    }

    /// `Σ_x P(x) f(x)` over register values `x`.
    pub fn expectation_diagonal<F>(&self, f: F, register: &[QubitIndex]) -> Result<f64>
    where
        F: Fn(usize) -> f64,
    {
        Ok(self
            .probabilities(register)?
            .iter()
            .enumerate()
            .map(|(x, p)| p * f(x))
            .sum())
    }

    pub fn trace(&self) -> f64 {
        self.basis_probabilities().iter().sum()
    }

    /// Dense density matrix. Intended for small registers.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        match &self.repr {
            Repr::Density(rho) => DMatrix::from_fn(dim, dim, |r, c| rho[(r << self.n_qubits) | c]),
            Repr::Pure(a) | Repr::Trajectory { amps: a, .. } => {
                DMatrix::from_fn(dim, dim, |r, c| a[r] * a[c].conj())
            }
            Repr::Ensemble(branches) => DMatrix::from_fn(dim, dim, |r, c| {
                branches.iter().map(|b| b[r] * b[c].conj()).sum()
            }),
        }
    }

    /// Reduced density matrix of `keep` (partial trace over every other qubit),
    /// indexed by register value of `keep`.
    pub fn reduced_density(&self, keep: &[QubitIndex]) -> Result<DMatrix<Complex64>> {
        self.check_register(keep)?;
        let env: Vec<QubitIndex> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let k = 1usize << keep.len();
        let compose = |a: usize, e: usize| {
            let mut i = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                i |= ((a >> j) & 1) << q;
            }
            for (j, &q) in env.iter().enumerate() {
                i |= ((e >> j) & 1) << q;
            }
            i
        };
        let n_env = 1usize << env.len();
        let mut out = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
        let accumulate = |out: &mut DMatrix<Complex64>, amps: &[Complex64]| {
            for e in 0..n_env {
                for a in 0..k {
                    let x = amps[compose(a, e)];
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..k {
                        out[(a, b)] += x * amps[compose(b, e)].conj();
                    }
                }
            }
        };
        match &self.repr {
            Repr::Pure(a) | Repr::Trajectory { amps: a, .. } => accumulate(&mut out, a),
            Repr::Ensemble(branches) => branches.iter().for_each(|b| accumulate(&mut out, b)),
            Repr::Density(rho) => {
                for e in 0..n_env {
                    for a in 0..k {
                        for b in 0..k {
                            let (r, c) = (compose(a, e), compose(b, e));
                            out[(a, b)] += rho[(r << self.n_qubits) | c];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Validates the backend's state invariants: unit norm for pure states;
    /// Hermitian, unit trace and positive semidefinite for density matrices.
    /// The eigenvalue check only runs for `n_qubits <= 8`.
    pub fn check_invariants(&self) -> Result<()> {
        let trace = self.trace();
        match &self.repr {
            Repr::Pure(_) | Repr::Trajectory { .. } => {
                if (trace - 1.0).abs() > 1e-10 {
                    return Err(Error::Validation(format!("norm {trace} deviates from 1")));
                }
            }
            Repr::Density(_) | Repr::Ensemble(_) => {
                if (trace - 1.0).abs() > 1e-12 {
                    return Err(Error::Validation(format!("trace {trace} deviates from 1")));
                }
                if self.n_qubits <= 8 {
                    let rho = self.density_matrix();
                    let dev = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if dev > 1e-10 {
                        return Err(Error::Validation(format!("ρ not Hermitian ({dev})")));
                    }
                    let min_eig = rho.symmetric_eigenvalues().min();
                    if min_eig < -1e-9 {
                        return Err(Error::Validation(format!(
                            "ρ has negative eigenvalue {min_eig}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
