//! Solution-quality metrics over a data-register distribution.
//!
//! Distributions are dense vectors indexed by selection mask (bit `i` set
//! when item `i + 1` is taken).

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knapsack::{parse_selection, OracleResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    /// Probability of sampling an optimal selection.
    pub p_best: f64,
    /// Mean probability per feasible selection, relative to uniform.
    pub feasibility_ratio: f64,
    /// Expected feasible value over the optimum; `None` when the optimum is 0.
    pub avg_performance: Option<f64>,
}

fn check(dist: &[f64], oracle: &OracleResult) -> Result<()> {
    if dist.len() != oracle.n_selections() {
        return Err(Error::Validation(format!(
            "distribution has {} entries, expected {}",
            dist.len(),
            oracle.n_selections()
        )));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-8 || dist.iter().any(|p| *p < -1e-12) {
        return Err(Error::Validation(format!("not a probability distribution (sum {total})")));
    }
    Ok(())
}

pub fn p_best(dist: &[f64], oracle: &OracleResult) -> Result<f64> {
    check(dist, oracle)?;
    Ok(oracle.best_solutions().iter().map(|&x| dist[x]).sum())
}

/// `F = (Σ_feasible P(x) / #feasible) · 2^m`.
pub fn feasibility_ratio(dist: &[f64], oracle: &OracleResult) -> Result<f64> {
    check(dist, oracle)?;
    let mass: f64 = oracle.feasible_set().map(|x| dist[x]).sum();
    Ok(mass / oracle.feasible_count() as f64 * oracle.n_selections() as f64)
}

/// `V̄ = Σ_feasible P(x)·Value(x) / best_value`.
pub fn avg_performance(dist: &[f64], oracle: &OracleResult) -> Result<Option<f64>> {
    check(dist, oracle)?;
    if oracle.best_value() == 0 {
        return Ok(None);
    }
    let expected: f64 = oracle.feasible_set().map(|x| dist[x] * oracle.value_of(x) as f64).sum();
    Ok(Some(expected / oracle.best_value() as f64))
}

pub fn compute_metrics(dist: &[f64], oracle: &OracleResult) -> Result<MetricSet> {
    Ok(MetricSet {
        p_best: p_best(dist, oracle)?,
        feasibility_ratio: feasibility_ratio(dist, oracle)?,
        avg_performance: avg_performance(dist, oracle)?,
    })
}

/// Metrics of the uniform distribution (random guessing).
pub fn uniform_metrics(oracle: &OracleResult) -> MetricSet {
    let n = oracle.n_selections();
    compute_metrics(&vec![1.0 / n as f64; n], oracle).expect("uniform is a distribution")
}

/// Converts a `bitstring → probability` map (item order, leftmost = item 1)
/// into a mask-indexed vector over `m` items.
pub fn from_bitstrings(map: &BTreeMap<String, f64>, m: usize) -> Result<Vec<f64>> {
    let mut dist = vec![0.0; 1 << m];
    for (x, p) in map {
        dist[parse_selection(x, m)?] += p;
    }
    Ok(dist)
}

/// Empirical distribution of `shots` seeded samples from `dist`.
pub fn sample_distribution(dist: &[f64], shots: usize, seed: u64) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::Config("shots must be >= 1".into()));
    }
    let sampler = WeightedIndex::new(dist.iter().map(|p| p.max(0.0)))
        .map_err(|e| Error::Validation(format!("cannot sample distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; dist.len()];
    for _ in 0..shots {
        counts[sampler.sample(&mut rng)] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
}

/// Total variation distance `½ Σ |p − q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
