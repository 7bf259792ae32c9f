//! Ansatz assembly for the three constraint encodings.
//!
//! * QUBO: slack qubits plus a quadratic penalty folded into the cost
//!   Hamiltonian (see [`crate::qubo`]).
//! * Penalty dephasing: the item weight is computed into an ancilla register,
//!   compared against the capacity, infeasible branches pick up a phase, and
//!   everything is uncomputed again.
//! * Zeno: the same comparison, but the flag is measured (non-selectively)
//!   and reset instead of being phased and uncomputed.

use std::fmt;
use std::str::FromStr;

use crate::arith::{adder, penal_block, reinit_block, test_block, PenalMode, RegisterPlan, ReinitVariant};
use crate::circuit::{CircuitProgram, RegisterLayout, Span};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::qubo::{build_qubo, qubo_ansatz_for_model, qubo_layer, SlackConvention};
use crate::sim::GateOp;

/// QAOA angles `(γ⃗, β⃗)` for `p ≥ 1` layers.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl AnsatzParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Validation(format!(
                "need p ≥ 1 matching angles, got {} gammas and {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    /// All-zero angles for `p` layers.
    pub fn zeros(p: usize) -> Result<Self> {
        Self::new(vec![0.0; p], vec![0.0; p])
    }

    /// Splits `θ = (γ⃗ ‖ β⃗)`.
    pub fn from_flat(theta: &[f64]) -> Result<Self> {
        if !theta.len().is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "parameter vector has odd length {}",
                theta.len()
            )));
        }
        let (g, b) = theta.split_at(theta.len() / 2);
        Self::new(g.to_vec(), b.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }
}

/// `e^{−iβ Σ X_q}`: `RX(2β)` on every qubit of `span`.
pub fn mixer(template: &CircuitProgram, span: Span, beta: f64) -> CircuitProgram {
    let mut c = template.empty_like();
    for q in span.qubits() {
        c.push(GateOp::Rx(q, 2.0 * beta)).expect("in range");
    }
    c.labeled("mixer")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodTag {
    Qubo,
    Dephasing,
    Zeno,
}

impl MethodTag {
    pub const ALL: [MethodTag; 3] = [MethodTag::Qubo, MethodTag::Dephasing, MethodTag::Zeno];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Qubo => "qubo",
            MethodTag::Dephasing => "dephasing",
            MethodTag::Zeno => "zeno",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qubo" => Ok(MethodTag::Qubo),
            "dephasing" => Ok(MethodTag::Dephasing),
            "zeno" => Ok(MethodTag::Zeno),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// Penalty-phase settings for the dephasing encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySettings {
    pub alpha: f64,
    pub mode: PenalMode,
    /// Use `−α` as the penalty angle instead of `−α·γ`.
    pub fixed_angle: bool,
}

impl PenaltySettings {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            mode: PenalMode::Flat,
            fixed_angle: false,
        }
    }

    /// Angle scale multiplying `α` in layer `γ`.
    pub fn gamma_scale(&self, gamma: f64) -> f64 {
        if self.fixed_angle {
            1.0
        } else {
            gamma
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EncodingMethod {
    Qubo { penalty: f64, slack: SlackConvention },
    Dephasing(PenaltySettings),
    Zeno,
}

impl EncodingMethod {
    pub fn qubo(penalty: f64) -> Self {
        EncodingMethod::Qubo {
            penalty,
            slack: SlackConvention::Exact,
        }
    }

    pub fn dephasing(alpha: f64) -> Self {
        EncodingMethod::Dephasing(PenaltySettings::new(alpha))
    }

    pub fn tag(&self) -> MethodTag {
        match self {
            EncodingMethod::Qubo { .. } => MethodTag::Qubo,
            EncodingMethod::Dephasing(_) => MethodTag::Dephasing,
            EncodingMethod::Zeno => MethodTag::Zeno,
        }
    }

    /// Whether the ansatz contains mid-circuit measurements.
    pub fn needs_channels(&self) -> bool {
        matches!(self, EncodingMethod::Zeno)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EncodingMethod::Qubo { penalty, .. } if !(*penalty > 0.0 && penalty.is_finite()) => Err(
                Error::Validation(format!("QUBO penalty must be positive, got {penalty}")),
            ),
            EncodingMethod::Dephasing(s) if !s.alpha.is_finite() => {
                Err(Error::Validation(format!("alpha must be finite, got {}", s.alpha)))
            }
            _ => Ok(()),
        }
    }

    /// Qubit layout of the ansatz for `inst`.
    pub fn layout(&self, inst: &KnapsackInstance) -> Result<(usize, RegisterLayout)> {
        match self {
            EncodingMethod::Qubo { penalty, slack } => {
                let model = build_qubo(inst, *penalty, *slack)?;
                Ok((model.n_vars(), model.layout()))
            }
            _ => {
                let plan = RegisterPlan::for_instance(inst);
                Ok((plan.n_qubits(), plan.layout()))
            }
        }
    }

    /// One QAOA layer at angles `(γ, β)`, without initialization.
    pub fn layer(&self, inst: &KnapsackInstance, gamma: f64, beta: f64) -> Result<CircuitProgram> {
        self.validate()?;
        let plan = RegisterPlan::for_instance(inst);
        Ok(match self {
            EncodingMethod::Qubo { penalty, slack } => {
                qubo_layer(&build_qubo(inst, *penalty, *slack)?, gamma, beta)
            }
            EncodingMethod::Dephasing(s) => dephasing_layer_with(inst, gamma, beta, s, &plan),
            EncodingMethod::Zeno => zeno_layer(inst, gamma, beta, &plan),
        })
    }
}

impl fmt::Display for EncodingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingMethod::Qubo { penalty, .. } => write!(f, "qubo(P={penalty})"),
            EncodingMethod::Dephasing(s) => write!(f, "dephasing(alpha={}, {:?})", s.alpha, s.mode),
            EncodingMethod::Zeno => f.write_str("zeno"),
        }
    }
}

/// `⊗ᵢ P(−γ·vᵢ)` on the data register.
pub fn return_phase(inst: &KnapsackInstance, gamma: f64, plan: &RegisterPlan) -> CircuitProgram {
    let mut c = plan.empty_circuit();
    for (i, &v) in inst.values().iter().enumerate() {
        c.push(GateOp::Phase(plan.data.at(i), -gamma * v as f64))
            .expect("in range");
    }
    c.labeled("return")
}

/// Flat-mode, γ-scaled penalty-dephasing layer.
pub fn dephasing_layer(
    inst: &KnapsackInstance,
    gamma: f64,
    beta: f64,
    alpha: f64,
    plan: &RegisterPlan,
) -> CircuitProgram {
    dephasing_layer_with(inst, gamma, beta, &PenaltySettings::new(alpha), plan)
}

/// RETURN → ADD → TEST → PENAL → REINIT → mixer on the data register.
pub fn dephasing_layer_with(
    inst: &KnapsackInstance,
    gamma: f64,
    beta: f64,
    settings: &PenaltySettings,
    plan: &RegisterPlan,
) -> CircuitProgram {
    let w = inst.capacity();
    let mut c = return_phase(inst, gamma, plan);
    for block in [
        adder(inst, plan),
        test_block(w, plan),
        penal_block(settings.alpha, settings.gamma_scale(gamma), settings.mode, plan),
        reinit_block(ReinitVariant::Dephasing, inst, w, plan),
        mixer(&plan.empty_circuit(), plan.data, beta),
    ] {
        c.append(&block).expect("same layout");
    }
    c
}

/// RETURN → ADD → TEST → measure-and-reset flag → ADD† → mixer on the data
/// register. The measurement outcome is discarded, not post-selected.
pub fn zeno_layer(inst: &KnapsackInstance, gamma: f64, beta: f64, plan: &RegisterPlan) -> CircuitProgram {
    let w = inst.capacity();
    let mut c = return_phase(inst, gamma, plan);
    let mut meter = plan.empty_circuit();
    meter.push(GateOp::MeasureReset(plan.flag)).expect("in range");
    for block in [
        adder(inst, plan),
        test_block(w, plan),
        meter.labeled("measure"),
        reinit_block(ReinitVariant::Zeno, inst, w, plan),
        mixer(&plan.empty_circuit(), plan.data, beta),
    ] {
        c.append(&block).expect("same layout");
    }
    c
}

/// Hadamards on the data register (and slack for QUBO), then `p` layers.
pub fn build_ansatz(
    inst: &KnapsackInstance,
    method: &EncodingMethod,
    params: &AnsatzParams,
) -> Result<CircuitProgram> {
    method.validate()?;
    if let EncodingMethod::Qubo { penalty, slack } = method {
        let model = build_qubo(inst, *penalty, *slack)?;
        return Ok(qubo_ansatz_for_model(&model, params));
    }
    let plan = RegisterPlan::for_instance(inst);
    let mut c = plan.empty_circuit();
    for q in plan.data.qubits() {
        c.push(GateOp::H(q)).expect("in range");
    }
    let mut c = c.labeled("init");
    for (g, b) in params.layers() {
        c.append(&method.layer(inst, g, b)?.labeled("layer"))?;
    }
    Ok(c)
}
