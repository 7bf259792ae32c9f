//! Fourier-space arithmetic shared by the penalty-dephasing and Zeno
//! encodings: QFT, the weighted adder, constant addition, the capacity
//! comparator, the penalty phase and ancilla reinitialization.
//!
//! Register integers are little-endian: position `j` of a span carries `2^j`.

use std::f64::consts::{PI, TAU};

use crate::circuit::{invert, CircuitProgram, RegisterLayout, Span};
use crate::knapsack::KnapsackInstance;
use crate::qubo::ceil_log2;
use crate::sim::GateOp;

/// Qubit allocation for the arithmetic encodings: `m` data qubits, an
/// `n`-qubit weight register with `n = ⌈log₂ Σw⌉ + 1`, and one flag qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterPlan {
    pub data: Span,
    pub weight_reg: Span,
    pub flag: usize,
    /// Largest weight the register has to hold (`Σw`).
    pub max_weight: u64,
}

impl RegisterPlan {
    pub fn for_instance(inst: &KnapsackInstance) -> Self {
        let m = inst.m();
        let total = inst.total_weight();
        let n = ceil_log2(total) + 1;
        Self {
            data: Span::new(0, m),
            weight_reg: Span::new(m, n),
            flag: m + n,
            max_weight: total,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.flag + 1
    }

    pub fn n_ancilla(&self) -> usize {
        self.weight_reg.len + 1
    }

    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout {
            data: self.data,
            ancilla: self.weight_reg,
            flag: Some(self.flag),
        }
    }

    pub fn empty_circuit(&self) -> CircuitProgram {
        CircuitProgram::new(self.n_qubits(), self.layout()).expect("plan layout is valid")
    }

    /// Basis index with the data register holding `data` and the weight
    /// register holding `weight`, flag set to `flag`.
    pub fn basis_index(&self, data: usize, weight: u64, flag: bool) -> usize {
        data | ((weight as usize) << self.weight_reg.start) | (usize::from(flag) << self.flag)
    }
}

/// Angle `2π·t/2^n` for `t = k·2^j mod 2^n`, or `None` when it vanishes.
fn fourier_angle(k: i64, j: usize, n: usize) -> Option<f64> {
    let modulus = 1i128 << n;
    let t = (k as i128 * (1i128 << j)).rem_euclid(modulus);
    (t != 0).then(|| TAU * t as f64 / modulus as f64)
}

/// Standard QFT on `reg`, `|y⟩ → 2^{-n/2} Σ_k e^{2πi yk/2^n} |k⟩`, built from
/// Hadamards, a controlled-phase ladder and the final bit-reversal swaps.
/// `base` supplies the register layout of the returned program.
pub fn qft(base: &CircuitProgram, reg: Span) -> CircuitProgram {
    let mut c = base.empty_like();
    let n = reg.len;
    for j in (0..n).rev() {
        c.push(GateOp::H(reg.at(j))).expect("in range");
        for k in (0..j).rev() {
            let angle = PI / (1u64 << (j - k)) as f64;
            c.push(GateOp::CPhase(reg.at(k), reg.at(j), angle))
                .expect("in range");
        }
    }
    for i in 0..n / 2 {
        c.push(GateOp::Swap(reg.at(i), reg.at(n - 1 - i)))
            .expect("in range");
    }
    c.labeled("qft")
}

/// `ADD|x⟩|y⟩ = |x⟩|y + Weight(x) mod 2^n⟩`: QFT on the weight register,
/// one controlled phase per (item, weight bit) pair, inverse QFT.
pub fn adder(inst: &KnapsackInstance, plan: &RegisterPlan) -> CircuitProgram {
    let base = plan.empty_circuit();
    let reg = plan.weight_reg;
    let forward = qft(&base, reg);
    let mut c = forward.clone();
    let mut phases = base.empty_like();
    for (i, &w) in inst.weights().iter().enumerate() {
        for j in 0..reg.len {
            if let Some(angle) = fourier_angle(w as i64, j, reg.len) {
                phases
                    .push(GateOp::CPhase(plan.data.at(i), reg.at(j), angle))
                    .expect("in range");
            }
        }
    }
    c.append(&phases).expect("same layout");
    c.append(&invert(&forward).expect("unitary")).expect("same layout");
    c.labeled("adder")
}

/// `|y⟩ → |y + k mod 2^n⟩` on `reg` using uncontrolled Fourier-space phases.
pub fn add_constant(base: &CircuitProgram, k: i64, reg: Span) -> CircuitProgram {
    let forward = qft(base, reg);
    let mut c = forward.clone();
    for j in 0..reg.len {
        if let Some(angle) = fourier_angle(k, j, reg.len) {
            c.push(GateOp::Phase(reg.at(j), angle)).expect("in range");
        }
    }
    c.append(&invert(&forward).expect("unitary")).expect("same layout");
    c.labeled("add_const")
}

/// `flag ← flag ⊕ [Weight > W]` with the weight register restored.
///
/// Subtracts `W + 1`; the register's top bit is then set exactly for
/// feasible weights, so it is negated, copied onto the flag and negated
/// back before `W + 1` is added again. When `W ≥ Σw` no weight can exceed
/// the capacity and the block is empty.
pub fn test_block(capacity: u64, plan: &RegisterPlan) -> CircuitProgram {
    let base = plan.empty_circuit();
    if capacity >= plan.max_weight {
        return base.labeled("test");
    }
    let reg = plan.weight_reg;
    let msb = reg.at(reg.len - 1);
    let shift = capacity as i64 + 1;
    let mut c = add_constant(&base, -shift, reg);
    for op in [
        GateOp::X(msb),
        GateOp::Cnot {
            control: msb,
            target: plan.flag,
        },
        GateOp::X(msb),
    ] {
        c.push(op).expect("in range");
    }
    c.append(&add_constant(&base, shift, reg)).expect("same layout");
    c.labeled("test")
}

/// How the penalty phase depends on the violating branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PenalMode {
    /// Constant phase `−α·γ` on flagged branches.
    #[default]
    Flat,
    /// Phase `−α·γ·Weight(x)` on flagged branches.
    Proportional,
}

/// Penalty phase on flagged branches; see [`PenalMode`]. Unflagged branches
/// are untouched.
pub fn penal_block(alpha: f64, gamma: f64, mode: PenalMode, plan: &RegisterPlan) -> CircuitProgram {
    let mut c = plan.empty_circuit();
    let angle = -alpha * gamma;
    match mode {
        PenalMode::Flat => c.push(GateOp::Phase(plan.flag, angle)).expect("in range"),
        PenalMode::Proportional => {
            for j in 0..plan.weight_reg.len {
                let scaled = angle * (1u64 << j) as f64;
                c.push(GateOp::CPhase(plan.flag, plan.weight_reg.at(j), scaled))
                    .expect("in range");
            }
        }
    }
    c.labeled("penal")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReinitVariant {
    /// `TEST†` then `ADD†`: uncomputes flag and weight register.
    Dephasing,
    /// `ADD†` only; the flag has already been measured and reset.
    Zeno,
}

pub fn reinit_block(
    variant: ReinitVariant,
    inst: &KnapsackInstance,
    capacity: u64,
    plan: &RegisterPlan,
) -> CircuitProgram {
    let undo_add = invert(&adder(inst, plan)).expect("unitary");
    let c = match variant {
        ReinitVariant::Dephasing => {
            let mut c = invert(&test_block(capacity, plan)).expect("unitary");
            c.append(&undo_add).expect("same layout");
            c
        }
        ReinitVariant::Zeno => undo_add,
    };
    c.labeled("reinit")
}
