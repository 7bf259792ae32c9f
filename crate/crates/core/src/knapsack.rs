//! 0/1 knapsack instances, a seeded generator and an exhaustive oracle.
//!
//! A selection is stored as a mask: bit `i` set means item `i + 1` is taken.
//! The same mask is the basis-state value of the data register (qubit `i`
//! carries item `i + 1`). Bitstrings use item order, so character `i` is
//! item `i + 1` and the leftmost character is item 1.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest item count the brute-force oracle will enumerate.
pub const MAX_ENUMERATION: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnapsackInstance {
    weights: Vec<u64>,
    values: Vec<u64>,
    capacity: u64,
}

/// Parameters of the random instance generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub w_max: u64,
    pub v_max: u64,
    /// Capacity as a fraction of the total weight.
    pub tightness: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            w_max: 10,
            v_max: 10,
            tightness: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub value: u64,
    pub weight: u64,
    pub feasible: bool,
}

/// Exhaustive solution table of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    m: usize,
    capacity: u64,
    best_value: u64,
    best_solutions: Vec<usize>,
    values: Vec<u64>,
    weights: Vec<u64>,
    feasible_count: usize,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<u64>, values: Vec<u64>, capacity: u64) -> Result<Self> {
        if weights.is_empty() || weights.len() != values.len() {
            return Err(Error::Validation(format!(
                "need m >= 1 items with matching lengths (weights {}, values {})",
                weights.len(),
                values.len()
            )));
        }
        if weights.iter().chain(&values).any(|&x| x == 0) {
            return Err(Error::Validation("weights and values must be >= 1".into()));
        }
        if capacity < 2 {
            return Err(Error::Validation(format!("capacity {capacity} < 2")));
        }
        if weights.len() > 63 {
            return Err(Error::Validation("at most 63 items are supported".into()));
        }
        Ok(Self {
            weights,
            values,
            capacity,
        })
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn total_value(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn evaluate_mask(&self, mask: usize) -> Evaluation {
        let (mut value, mut weight) = (0, 0);
        for i in 0..self.m() {
            if (mask >> i) & 1 == 1 {
                value += self.values[i];
                weight += self.weights[i];
            }
        }
        Evaluation {
            value,
            weight,
            feasible: weight <= self.capacity,
        }
    }

    /// Value, weight and feasibility of an item-order bitstring.
    pub fn evaluate(&self, x: &str) -> Result<Evaluation> {
        Ok(self.evaluate_mask(parse_selection(x, self.m())?))
    }

    /// Text form: `m W`, then weights, then values, one line each.
    pub fn to_text(&self) -> String {
        let join = |xs: &[u64]| {
            xs.iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "{} {}\n{}\n{}\n",
            self.m(),
            self.capacity,
            join(&self.weights),
            join(&self.values)
        )
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

impl FromStr for KnapsackInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let mut ints = |what: &str| -> Result<Vec<u64>> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what} line")))?
                .split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|e| Error::Parse(format!("{what}: {t:?}: {e}")))
                })
                .collect()
        };
        let header = ints("header")?;
        let [m, capacity] = header[..] else {
            return Err(Error::Parse("header must be `m W`".into()));
        };
        let weights = ints("weights")?;
        let values = ints("values")?;
        if weights.len() as u64 != m || values.len() as u64 != m {
            return Err(Error::Parse(format!(
                "header declares {m} items, found {} weights and {} values",
                weights.len(),
                values.len()
            )));
        }
        Self::new(weights, values, capacity)
    }
}

impl fmt::Display for KnapsackInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "w={:?} v={:?} W={}",
            self.weights, self.values, self.capacity
        )
    }
}

/// Seeded random instance: weights and values uniform in `[1, w_max]` and
/// `[1, v_max]`, capacity `max(2, floor(tightness · Σw))`.
pub fn generate(seed: u64, m: usize, params: GeneratorParams) -> Result<KnapsackInstance> {
    if m == 0 || params.w_max == 0 || params.v_max == 0 {
        return Err(Error::Validation("m, w_max and v_max must be >= 1".into()));
    }
    if !(params.tightness > 0.0 && params.tightness <= 1.0) {
        return Err(Error::Validation(format!(
            "tightness {} outside (0, 1]",
            params.tightness
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=params.w_max)).collect();
    let values: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=params.v_max)).collect();
    let total: u64 = weights.iter().sum();
    let capacity = ((params.tightness * total as f64).floor() as u64).max(2);
    KnapsackInstance::new(weights, values, capacity)
}

/// Exhaustive enumeration of all `2^m` selections.
pub fn brute_force(inst: &KnapsackInstance) -> Result<OracleResult> {
    let m = inst.m();
    if m > MAX_ENUMERATION {
        return Err(Error::EnumerationGuard {
            m,
            limit: MAX_ENUMERATION,
        });
    }
    let n = 1usize << m;
    let mut values = vec![0u64; n];
    let mut weights = vec![0u64; n];
    // grow tables by the lowest set bit
    for mask in 1..n {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        values[mask] = values[rest] + inst.values[i];
        weights[mask] = weights[rest] + inst.weights[i];
    }
    let mut best_value = 0;
    let mut best_solutions = vec![];
    let mut feasible_count = 0;
    for mask in 0..n {
        if weights[mask] > inst.capacity {
            continue;
        }
        feasible_count += 1;
        if values[mask] > best_value {
            best_value = values[mask];
            best_solutions.clear();
        }
        if values[mask] == best_value {
            best_solutions.push(mask);
        }
    }
    Ok(OracleResult {
        m,
        capacity: inst.capacity,
        best_value,
        best_solutions,
        values,
        weights,
        feasible_count,
    })
}

impl OracleResult {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn best_value(&self) -> u64 {
        self.best_value
    }

    /// Masks of every optimal selection.
    pub fn best_solutions(&self) -> &[usize] {
        &self.best_solutions
    }

    pub fn is_best(&self, mask: usize) -> bool {
        self.best_solutions.binary_search(&mask).is_ok()
    }

    pub fn value_of(&self, mask: usize) -> u64 {
        self.values[mask]
    }

    pub fn weight_of(&self, mask: usize) -> u64 {
        self.weights[mask]
    }

    pub fn is_feasible(&self, mask: usize) -> bool {
        self.weights[mask] <= self.capacity
    }

    pub fn feasible_count(&self) -> usize {
        self.feasible_count
    }

    pub fn n_selections(&self) -> usize {
        self.values.len()
    }

    pub fn feasible_set(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(|&x| self.is_feasible(x))
    }

    /// Optimal selections as item-order bitstrings.
    pub fn best_bitstrings(&self) -> Vec<String> {
        self.best_solutions
            .iter()
            .map(|&x| selection_bitstring(x, self.m))
            .collect()
    }
}

/// Item-order bitstring of a selection mask.
pub fn selection_bitstring(mask: usize, m: usize) -> String {
    (0..m)
        .map(|i| if (mask >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses an item-order bitstring of length `m` into a selection mask.
pub fn parse_selection(x: &str, m: usize) -> Result<usize> {
    if x.len() != m {
        return Err(Error::Validation(format!(
            "selection {x:?} has length {}, expected {m}",
            x.len()
        )));
    }
    x.chars().enumerate().try_fold(0usize, |acc, (i, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << i)),
        _ => Err(Error::Validation(format!("invalid character {ch:?} in {x:?}"))),
    })
}
