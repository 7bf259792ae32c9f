use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::arith::PenalMode;
use crate::encoding::{EncodingMethod, MethodTag, PenaltySettings};
use crate::error::{Error, Result};
use crate::knapsack::GeneratorParams;
use crate::optimizer::OptimizerOptions;
use crate::qubo::SlackConvention;
use crate::simulate::BackendChoice;

/// Where the optimizer loop gets its distributions from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectiveMode {
    /// Closed-form data-register evolution; identical results, much faster.
    #[default]
    Reduced,
    /// Gate-level simulation on the configured backend.
    Circuit,
}

/// A full benchmark sweep. Every field can be set from a `key = value`
/// config file or the matching command-line flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub methods: Vec<MethodTag>,
    pub sizes: Vec<usize>,
    pub layers: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    /// QUBO penalty weight `P`.
    pub penalty: f64,
    /// Dephasing penalty strength `α`.
    pub alpha: f64,
    pub penal_mode: PenalMode,
    pub penal_fixed_angle: bool,
    pub slack: SlackConvention,
    /// Backend for the final distribution.
    pub backend: BackendChoice,
    pub objective: ObjectiveMode,
    /// Finite-shot sampling of objectives and final distributions.
    pub shots: Option<usize>,
    /// Trajectories averaged per distribution on the trajectory backend.
    pub trajectories: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    pub generator: GeneratorParams,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let opt = OptimizerOptions::default();
        Self {
            methods: MethodTag::ALL.to_vec(),
            sizes: vec![3, 4, 5, 6],
            layers: vec![5],
            instances: 50,
            seed: 0,
            penalty: 10.0,
            alpha: 10_000.0,
            penal_mode: PenalMode::Flat,
            penal_fixed_angle: false,
            slack: SlackConvention::Exact,
            backend: BackendChoice::Auto,
            objective: ObjectiveMode::Reduced,
            shots: None,
            trajectories: 1000,
            restarts: 3,
            max_iterations: opt.max_iterations,
            tolerance: opt.tolerance,
            initial_step: opt.initial_step,
            generator: GeneratorParams::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse '{value}': {e}")))
}

/// Comma-separated list; integer items may also be inclusive ranges `a..=b`.
fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_sizes(key: &str, value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..=") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (parse(key, a)?, parse(key, b)?);
                out.extend(a..=b);
            }
            None => out.push(parse(key, item)?),
        }
    }
    Ok(out)
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected a boolean, got '{other}'"))),
    }
}

pub fn parse_penal_mode(value: &str) -> Result<PenalMode> {
    match value.trim().to_ascii_lowercase().as_str() {
        "flat" => Ok(PenalMode::Flat),
        "proportional" => Ok(PenalMode::Proportional),
        other => Err(Error::Config(format!("unknown penal mode '{other}'"))),
    }
}

pub fn parse_slack(value: &str) -> Result<SlackConvention> {
    match value.trim().to_ascii_lowercase().as_str() {
        "exact" => Ok(SlackConvention::Exact),
        "paper" => Ok(SlackConvention::Paper),
        other => Err(Error::Config(format!("unknown slack convention '{other}'"))),
    }
}

fn parse_objective(value: &str) -> Result<ObjectiveMode> {
    match value.trim().to_ascii_lowercase().as_str() {
        "reduced" => Ok(ObjectiveMode::Reduced),
        "circuit" => Ok(ObjectiveMode::Circuit),
        other => Err(Error::Config(format!("unknown objective mode '{other}'"))),
    }
}

impl ExperimentConfig {
    /// Sets one field by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        match k {
            "methods" => self.methods = parse_list(k, value)?,
            "sizes" => self.sizes = parse_sizes(k, value)?,
            "layers" => self.layers = parse_sizes(k, value)?,
            "instances" | "instances_per_cell" => self.instances = parse(k, value)?,
            "seed" => self.seed = parse(k, value)?,
            "penalty" | "p_penalty" => self.penalty = parse(k, value)?,
            "alpha" => self.alpha = parse(k, value)?,
            "penal_mode" => self.penal_mode = parse_penal_mode(value)?,
            "penal_fixed_angle" => self.penal_fixed_angle = parse_bool(k, value)?,
            "slack" => self.slack = parse_slack(value)?,
            "backend" => self.backend = parse(k, value)?,
            "objective" => self.objective = parse_objective(value)?,
            "shots" => {
                self.shots = match value.trim() {
                    "" | "exact" | "none" => None,
                    v => Some(parse(k, v)?),
                }
            }
            "trajectories" => self.trajectories = parse(k, value)?,
            "restarts" => self.restarts = parse(k, value)?,
            "max_iterations" => self.max_iterations = parse(k, value)?,
            "tolerance" => self.tolerance = parse(k, value)?,
            "initial_step" => self.initial_step = parse(k, value)?,
            "w_max" => self.generator.w_max = parse(k, value)?,
            "v_max" => self.generator.v_max = parse(k, value)?,
            "tightness" => self.generator.tightness = parse(k, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value.trim()),
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` text (blank lines and `#` comments ignored).
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let methods: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        let mut lines = vec![
            format!("methods = {}", methods.join(",")),
            format!("sizes = {}", join(&self.sizes)),
            format!("layers = {}", join(&self.layers)),
            format!("instances = {}", self.instances),
            format!("seed = {}", self.seed),
            format!("penalty = {}", self.penalty),
            format!("alpha = {}", self.alpha),
            format!("penal_mode = {}", match self.penal_mode {
                PenalMode::Flat => "flat",
                PenalMode::Proportional => "proportional",
            }),
            format!("penal_fixed_angle = {}", self.penal_fixed_angle),
            format!("slack = {}", match self.slack {
                SlackConvention::Exact => "exact",
                SlackConvention::Paper => "paper",
            }),
            format!("backend = {}", self.backend),
            format!("objective = {}", match self.objective {
                ObjectiveMode::Reduced => "reduced",
                ObjectiveMode::Circuit => "circuit",
            }),
            format!("shots = {}", self.shots.map_or("exact".to_string(), |s| s.to_string())),
            format!("trajectories = {}", self.trajectories),
            format!("restarts = {}", self.restarts),
            format!("max_iterations = {}", self.max_iterations),
            format!("tolerance = {}", self.tolerance),
            format!("initial_step = {}", self.initial_step),
            format!("w_max = {}", self.generator.w_max),
            format!("v_max = {}", self.generator.v_max),
            format!("tightness = {}", self.generator.tightness),
            format!("output_dir = {}", self.output_dir.display()),
        ];
        lines.push(String::new());
        lines.join("\n")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.methods.is_empty() || self.sizes.is_empty() || self.layers.is_empty() {
            return fail("methods, sizes and layers must be non-empty".into());
        }
        if self.instances == 0 || self.restarts == 0 || self.trajectories == 0 {
            return fail("instances, restarts and trajectories must be >= 1".into());
        }
        if self.sizes.contains(&0) || self.layers.contains(&0) {
            return fail("sizes and layers must be >= 1".into());
        }
        if self.shots == Some(0) {
            return fail("shots must be >= 1".into());
        }
        if let Some(&m) = self.sizes.iter().max() {
            if m > crate::knapsack::MAX_ENUMERATION {
                return fail(format!(
                    "size {m} exceeds the brute-force limit of {}",
                    crate::knapsack::MAX_ENUMERATION
                ));
            }
        }
        self.optimizer_options(0).validate()?;
        for &tag in &self.methods {
            let method = self.encoding(tag);
            method.validate()?;
            self.backend.resolve(&method, 0)?;
        }
        Ok(())
    }

    pub fn encoding(&self, tag: MethodTag) -> EncodingMethod {
        match tag {
            MethodTag::Qubo => EncodingMethod::Qubo {
                penalty: self.penalty,
                slack: self.slack,
            },
            MethodTag::Dephasing => EncodingMethod::Dephasing(PenaltySettings {
                alpha: self.alpha,
                mode: self.penal_mode,
                fixed_angle: self.penal_fixed_angle,
            }),
            MethodTag::Zeno => EncodingMethod::Zeno,
        }
    }

    pub fn optimizer_options(&self, seed: u64) -> OptimizerOptions {
        OptimizerOptions {
            max_iterations: self.max_iterations,
            initial_step: self.initial_step,
            tolerance: self.tolerance,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocol() {
        let c = ExperimentConfig::default();
        assert_eq!(c.sizes, vec![3, 4, 5, 6]);
        assert_eq!(c.layers, vec![5]);
        assert_eq!((c.instances, c.penalty, c.alpha), (50, 10.0, 10_000.0));
        c.validate().unwrap();
    }

    #[test]
    fn text_roundtrip() {
        let mut c = ExperimentConfig::default();
        c.apply_text("methods = zeno, qubo\nsizes = 3..=5 # inclusive\n\nshots = 100\npenal-mode = proportional\n")
            .unwrap();
        assert_eq!(c.methods, vec![MethodTag::Zeno, MethodTag::Qubo]);
        assert_eq!(c.sizes, vec![3, 4, 5]);
        assert_eq!(c.shots, Some(100));
        assert_eq!(c.penal_mode, PenalMode::Proportional);
        let mut d = ExperimentConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ExperimentConfig::default();
        assert!(c.set("colour", "blue").is_err());
        assert!(c.set("instances", "many").is_err());
        assert!(c.apply_text("just words").is_err());
        c.set("backend", "statevector").unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.methods = vec![MethodTag::Qubo];
        c.validate().unwrap();
        c.instances = 0;
        assert!(c.validate().is_err());
    }
}
