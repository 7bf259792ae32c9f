use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, ObjectiveMode};
use crate::circuit::count_resources;
use crate::encoding::MethodTag;
use crate::error::{Error, Result};
use crate::knapsack::{brute_force, generate};
use crate::metrics::{compute_metrics, sample_distribution};
use crate::optimizer::{make_objective, multistart};
use crate::simulate::{Evaluator, Simulator};

/// Environment variable bounding the worker pool of [`run_experiment`].
pub const THREADS_ENV: &str = "QAOA_BENCH_THREADS";

/// One row of the results table: a single (method, size, p, instance) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: MethodTag,
    pub m: usize,
    pub p: usize,
    pub instance_seed: u64,
    pub nfev: usize,
    pub wall_time_ms: f64,
    pub p_best: f64,
    pub feasibility_ratio: f64,
    /// Missing when the optimum value is 0.
    pub avg_performance: Option<f64>,
    pub n_qubits: usize,
    pub n_ancilla: usize,
    pub two_qubit_gates_per_layer: usize,
}

impl RunRecord {
    /// Equality of every column except the wall time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        RunRecord {
            wall_time_ms: 0.0,
            ..self.clone()
        } == RunRecord {
            wall_time_ms: 0.0,
            ..other.clone()
        }
    }
}

fn hash_seed(parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    for part in parts {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Seed of the `index`-th instance of size `m`. It does not depend on the
/// method or layer count, so every method is compared on the same problems.
pub fn instance_seed(master: u64, m: usize, index: usize) -> u64 {
    hash_seed(&[
        b"instance",
        &master.to_le_bytes(),
        &(m as u64).to_le_bytes(),
        &(index as u64).to_le_bytes(),
    ])
}

/// Seed for the optimizer's random restarts in one cell.
pub fn optimizer_seed(master: u64, method: MethodTag, m: usize, p: usize, index: usize) -> u64 {
    hash_seed(&[
        b"optimizer",
        &master.to_le_bytes(),
        method.as_str().as_bytes(),
        &(m as u64).to_le_bytes(),
        &(p as u64).to_le_bytes(),
        &(index as u64).to_le_bytes(),
    ])
}

/// Generates, optimizes and evaluates one cell.
pub fn run_cell(cfg: &ExperimentConfig, tag: MethodTag, m: usize, p: usize, index: usize) -> Result<RunRecord> {
    let inst_seed = instance_seed(cfg.seed, m, index);
    let opt_seed = optimizer_seed(cfg.seed, tag, m, p, index);
    let inst = generate(inst_seed, m, cfg.generator)?;
    let oracle = brute_force(&inst)?;
    let method = cfg.encoding(tag);
    let backend = cfg.backend.resolve(&method, opt_seed)?;
    let final_eval = Evaluator::Circuit {
        backend,
        trajectories: cfg.trajectories,
    };
    let loop_eval = match cfg.objective {
        ObjectiveMode::Reduced => Evaluator::Reduced,
        ObjectiveMode::Circuit => final_eval,
    };
    let layer = method.layer(&inst, 1.0, 1.0)?;
    let resources = count_resources(&layer, p);

    let start = Instant::now();
    let mut objective = make_objective(&inst, &method, loop_eval, p, cfg.shots, opt_seed)?;
    let trace = multistart(
        |theta: &[f64]| objective.evaluate(theta),
        2 * p,
        cfg.restarts,
        &cfg.optimizer_options(opt_seed),
    )?;
    let sim = Simulator::new(&inst, &method, final_eval)?;
    let mut dist = sim.data_distribution(&trace.best_params()?)?;
    if let Some(shots) = cfg.shots {
        dist = sample_distribution(&dist, shots, opt_seed)?;
    }
    let metrics = compute_metrics(&dist, &oracle)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    Ok(RunRecord {
        method: tag,
        m,
        p,
        instance_seed: inst_seed,
        nfev: trace.nfev,
        wall_time_ms,
        p_best: metrics.p_best,
        feasibility_ratio: metrics.feasibility_ratio,
        avg_performance: metrics.avg_performance,
        n_qubits: layer.n_qubits(),
        n_ancilla: resources.n_ancilla_qubits,
        two_qubit_gates_per_layer: resources.two_qubit_gates_per_layer,
    })
}

/// Cells in output order: method (qubo, dephasing, zeno), size, p, index.
pub fn cells(cfg: &ExperimentConfig) -> Vec<(MethodTag, usize, usize, usize)> {
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let mut out = Vec::new();
    for &tag in &methods {
        for &m in &cfg.sizes {
            for &p in &cfg.layers {
                for i in 0..cfg.instances {
                    out.push((tag, m, p, i));
                }
            }
        }
    }
    out.sort_by_key(|&(t, m, p, i)| (t, m, p, i));
    out
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every cell of `cfg` on a worker pool. Records come back in
/// [`cells`] order regardless of scheduling, and all columns except
/// `wall_time_ms` depend only on the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let cells = cells(cfg);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(tag, m, p, i)| run_cell(cfg, tag, m, p, i))
            .collect()
    })
}
