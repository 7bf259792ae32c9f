//! Derivative-free minimization of the QAOA objective.
//!
//! The minimizer is Nelder–Mead with dimension-adaptive coefficients
//! (reflection 1, expansion `1 + 2/n`, contraction `3/4 − 1/(2n)`, shrink
//! `1 − 1/n`), which behaves much better than the classic coefficients in
//! the 10–20 dimensional parameter spaces of a `p`-layer ansatz.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{AnsatzParams, EncodingMethod};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::qubo::build_qubo;
use crate::simulate::{Evaluator, Simulator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    pub initial_step: f64,
    /// Bound on both the spread of simplex values and its size (∞-norm).
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            initial_step: 0.5,
            tolerance: 1e-4,
            seed: 0,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be >= 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Validation(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::Validation(format!(
                "initial_step must be > 0, got {}",
                self.initial_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Objective evaluations, summed over restarts.
    pub nfev: usize,
    pub iterations: usize,
    /// `(iteration, best value so far)`, starting with the initial simplex.
    pub history: Vec<(usize, f64)>,
}

impl OptimizationTrace {
    /// The best point read as `(γ⃗ ‖ β⃗)`.
    pub fn best_params(&self) -> Result<AnsatzParams> {
        AnsatzParams::from_flat(&self.best_point)
    }
}

struct Counted<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    nfev: usize,
}

impl Counted<'_> {
    fn call(&mut self, x: &[f64]) -> Result<f64> {
        self.nfev += 1;
        let value = (self.f)(x)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective {
                value,
                point: x.to_vec(),
            });
        }
        Ok(value)
    }
}

fn coefficients(n: usize) -> (f64, f64, f64, f64) {
    if n < 2 {
        return (1.0, 2.0, 0.5, 0.5);
    }
    let n = n as f64;
    (1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n)
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Nelder–Mead from the axis-aligned simplex `x0 + step·eᵢ`. Stops when
/// both the value spread and the simplex size fall below the tolerance,
/// when all vertices share one value, or after `max_iterations`.
pub fn minimize<F>(mut objective: F, x0: &[f64], opts: &OptimizerOptions) -> Result<OptimizationTrace>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    opts.validate()?;
    if x0.is_empty() {
        return Err(Error::Validation("cannot minimize over zero parameters".into()));
    }
    let n = x0.len();
    let (rho, chi, gamma, sigma) = coefficients(n);
    let mut f = Counted {
        f: &mut objective,
        nfev: 0,
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f.call(x0)?));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = f.call(&x)?;
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);
    let mut history = vec![(0, simplex[0].1)];
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread == 0.0 || (spread <= opts.tolerance && size <= opts.tolerance) {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = lerp(&centroid, &worst.0, -rho);
        let fr = f.call(&xr)?;

        if fr < simplex[0].1 {
            let xe = lerp(&centroid, &xr, chi);
            let fe = f.call(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, target) = if fr < worst.1 {
                (lerp(&centroid, &xr, gamma), fr)
            } else {
                (lerp(&centroid, &worst.0, gamma), worst.1)
            };
            let fc = f.call(&xc)?;
            if fc < target || (fr < worst.1 && fc <= fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = lerp(&best, &vertex.0, sigma);
                    let v = f.call(&x)?;
                    *vertex = (x, v);
                }
            }
        }
        order(&mut simplex);
        history.push((iterations, simplex[0].1));
    }

    let nfev = f.nfev;
    let (best_point, best_value) = simplex.swap_remove(0);
    Ok(OptimizationTrace {
        best_point,
        best_value,
        nfev,
        iterations,
        history,
    })
}

/// Starting point of restart `restart`: uniform in `[0, 2π)^n`.
pub fn initial_point(seed: u64, restart: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()
}

/// Runs [`minimize`] from `restarts` seeded random points and keeps the best
/// run; `nfev` and `iterations` are summed over all runs.
pub fn multistart<F>(
    mut objective: F,
    n_params: usize,
    restarts: usize,
    opts: &OptimizerOptions,
) -> Result<OptimizationTrace>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if restarts == 0 {
        return Err(Error::Validation("restarts must be >= 1".into()));
    }
    let mut best: Option<OptimizationTrace> = None;
    let (mut nfev, mut iterations) = (0, 0);
    for r in 0..restarts {
        let x0 = initial_point(opts.seed, r, n_params);
        let trace = minimize(&mut objective, &x0, opts)?;
        nfev += trace.nfev;
        iterations += trace.iterations;
        if best.as_ref().is_none_or(|b| trace.best_value < b.best_value) {
            best = Some(trace);
        }
    }
    let mut best = best.expect("restarts >= 1");
    best.nfev = nfev;
    best.iterations = iterations;
    Ok(best)
}

/// Classical cost of a selection for the phase-based encodings:
/// `−Value(x) + α_cl·max(0, Weight(x) − W)` with `α_cl = Σv + 1`.
pub fn classical_cost(inst: &KnapsackInstance, mask: usize) -> f64 {
    let e = inst.evaluate_mask(mask);
    let alpha_cl = inst.total_value() as f64 + 1.0;
    let excess = e.weight.saturating_sub(inst.capacity()) as f64;
    -(e.value as f64) + alpha_cl * excess
}

/// Expectation of a diagonal cost over the objective register of an ansatz,
/// optionally estimated from a finite number of shots.
#[derive(Debug, Clone)]
pub struct Objective {
    sim: Simulator,
    cost: Vec<f64>,
    p: usize,
    shots: Option<usize>,
    rng: ChaCha8Rng,
}

/// Builds the objective for `method` on `inst`: `⟨H_C⟩` over all `m + c`
/// QUBO variables, or the expected [`classical_cost`] over the data register.
pub fn make_objective(
    inst: &KnapsackInstance,
    method: &EncodingMethod,
    evaluator: Evaluator,
    p: usize,
    shots: Option<usize>,
    seed: u64,
) -> Result<Objective> {
    if p == 0 {
        return Err(Error::Validation("layer count p must be >= 1".into()));
    }
    if shots == Some(0) {
        return Err(Error::Config("shots must be >= 1".into()));
    }
    let sim = Simulator::new(inst, method, evaluator)?;
    let cost = match method {
        EncodingMethod::Qubo { penalty, slack } => build_qubo(inst, *penalty, *slack)?.energy_table(),
        _ => (0..1usize << inst.m()).map(|x| classical_cost(inst, x)).collect(),
    };
    Ok(Objective {
        sim,
        cost,
        p,
        shots,
        rng: ChaCha8Rng::seed_from_u64(seed),
    })
}

impl Objective {
    pub fn n_params(&self) -> usize {
        2 * self.p
    }

    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }

    /// Cost of each basis value of the objective register.
    pub fn cost_table(&self) -> &[f64] {
        &self.cost
    }

    /// Exact expectation of the cost under `dist`.
    pub fn expectation(&self, dist: &[f64]) -> f64 {
        dist.iter().zip(&self.cost).map(|(p, c)| p * c).sum()
    }

    pub fn evaluate(&mut self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.n_params() {
            return Err(Error::Validation(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                theta.len()
            )));
        }
        let dist = self.sim.register_distribution(&AnsatzParams::from_flat(theta)?)?;
        match self.shots {
            None => Ok(self.expectation(&dist)),
            Some(shots) => {
                let sampler = WeightedIndex::new(dist.iter().map(|p| p.max(0.0)))
                    .map_err(|e| Error::ContractViolation(format!("bad distribution: {e}")))?;
                let total: f64 = (0..shots).map(|_| self.cost[sampler.sample(&mut self.rng)]).sum();
                Ok(total / shots as f64)
            }
        }
    }
}
