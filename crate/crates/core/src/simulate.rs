//! Output distributions of a built ansatz, either from gate-level circuit
//! simulation or from the closed-form [`ReducedEvaluator`].

use std::fmt;
use std::str::FromStr;

use crate::circuit::run;
use crate::encoding::{build_ansatz, AnsatzParams, EncodingMethod};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::reduced::ReducedEvaluator;
use crate::sim::{init_state, Backend, QubitIndex};

/// Backend selection as exposed to configuration: a concrete [`Backend`] or
/// `auto` (statevector for unitary encodings, branch ensemble for Zeno).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendChoice {
    #[default]
    Auto,
    StateVector,
    DensityMatrix,
    Trajectory,
    Ensemble,
}

impl BackendChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendChoice::Auto => "auto",
            BackendChoice::StateVector => "statevector",
            BackendChoice::DensityMatrix => "density",
            BackendChoice::Trajectory => "trajectory",
            BackendChoice::Ensemble => "ensemble",
        }
    }

    /// Concrete backend for `method`; trajectory runs are seeded per shot
    /// later on, so `seed` here is only the base.
    pub fn resolve(self, method: &EncodingMethod, seed: u64) -> Result<Backend> {
        let backend = match self {
            BackendChoice::Auto if method.needs_channels() => Backend::Ensemble,
            BackendChoice::Auto | BackendChoice::StateVector => Backend::StateVector,
            BackendChoice::DensityMatrix => Backend::DensityMatrix,
            BackendChoice::Trajectory => Backend::Trajectory { seed },
            BackendChoice::Ensemble => Backend::Ensemble,
        };
        if method.needs_channels() && !backend.supports_channels() {
            return Err(Error::Config(format!(
                "{} needs mid-circuit measurement, which the {} backend cannot simulate",
                method.tag(),
                backend.name()
            )));
        }
        Ok(backend)
    }
}

impl fmt::Display for BackendChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "auto" => BackendChoice::Auto,
            "statevector" | "sv" => BackendChoice::StateVector,
            "density" | "density-matrix" | "dm" => BackendChoice::DensityMatrix,
            "trajectory" => BackendChoice::Trajectory,
            "ensemble" => BackendChoice::Ensemble,
            other => return Err(Error::Parse(format!("unknown backend '{other}'"))),
        })
    }
}

/// How distributions are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    /// Closed-form data-register evolution (see [`crate::reduced`]).
    Reduced,
    /// Full gate-level simulation. For the trajectory backend the
    /// distribution is averaged over `trajectories` independently seeded runs.
    Circuit { backend: Backend, trajectories: usize },
}

impl Evaluator {
    pub fn circuit(backend: Backend) -> Self {
        Evaluator::Circuit {
            backend,
            trajectories: 1,
        }
    }
}

/// Seed of the `k`-th trajectory derived from a base seed.
pub fn trajectory_seed(base: u64, k: usize) -> u64 {
    base ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Distribution source bound to one instance and encoding.
#[derive(Debug, Clone)]
pub struct Simulator {
    inst: KnapsackInstance,
    method: EncodingMethod,
    evaluator: Evaluator,
    reduced: Option<ReducedEvaluator>,
    n_register: usize,
}

impl Simulator {
    pub fn new(inst: &KnapsackInstance, method: &EncodingMethod, evaluator: Evaluator) -> Result<Self> {
        method.validate()?;
        if let Evaluator::Circuit { backend, trajectories } = evaluator {
            if method.needs_channels() && !backend.supports_channels() {
                return Err(Error::Config(format!(
                    "{} needs mid-circuit measurement, which the {} backend cannot simulate",
                    method.tag(),
                    backend.name()
                )));
            }
            if trajectories == 0 {
                return Err(Error::Config("trajectory count must be at least 1".into()));
            }
        }
        let reduced = match evaluator {
            Evaluator::Reduced => Some(ReducedEvaluator::new(inst, method)?),
            Evaluator::Circuit { .. } => None,
        };
        let n_register = match method {
            EncodingMethod::Qubo { .. } => method.layout(inst)?.0,
            _ => inst.m(),
        };
        Ok(Self {
            inst: inst.clone(),
            method: *method,
            evaluator,
            reduced,
            n_register,
        })
    }

    pub fn instance(&self) -> &KnapsackInstance {
        &self.inst
    }

    pub fn method(&self) -> &EncodingMethod {
        &self.method
    }

    /// Width of the register the objective is read from: `m + c` for QUBO,
    /// `m` otherwise. The data register is always its low `m` qubits.
    pub fn n_register(&self) -> usize {
        self.n_register
    }

    /// Distribution over the objective register, indexed by basis value.
    pub fn register_distribution(&self, params: &AnsatzParams) -> Result<Vec<f64>> {
        match (&self.reduced, self.evaluator) {
            (Some(r), _) => Ok(r.distribution(params)),
            (None, Evaluator::Circuit { backend, trajectories }) => {
                let register: Vec<QubitIndex> = (0..self.n_register).collect();
                let c = build_ansatz(&self.inst, &self.method, params)?;
                let hadamards: &[QubitIndex] = &[];
                match backend {
                    Backend::Trajectory { seed } => {
                        let mut acc = vec![0.0; 1 << self.n_register];
                        for k in 0..trajectories {
                            let b = Backend::Trajectory {
                                seed: trajectory_seed(seed, k),
                            };
                            let out = run(&c, init_state(c.n_qubits(), hadamards, b)?)?;
                            for (a, p) in acc.iter_mut().zip(out.probabilities(&register)?) {
                                *a += p;
                            }
                        }
                        acc.iter_mut().for_each(|a| *a /= trajectories as f64);
                        Ok(acc)
                    }
                    _ => run(&c, init_state(c.n_qubits(), hadamards, backend)?)?.probabilities(&register),
                }
            }
            (None, Evaluator::Reduced) => unreachable!("reduced evaluator is built eagerly"),
        }
    }

    /// Data-register marginal indexed by selection mask.
    pub fn data_distribution(&self, params: &AnsatzParams) -> Result<Vec<f64>> {
        let full = self.register_distribution(params)?;
        Ok(marginal(&full, self.inst.m()))
    }
}

/// Marginal over the low `m` bits of the index.
pub fn marginal(dist: &[f64], m: usize) -> Vec<f64> {
    let mask = (1usize << m) - 1;
    let mut out = vec![0.0; 1 << m];
    for (z, p) in dist.iter().enumerate() {
        out[z & mask] += p;
    }
    out
}
