//! Gate set used by every circuit in the crate.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Position of a qubit in a register layout. Qubit 0 is the least-significant
/// bit of a basis-state index.
pub type QubitIndex = usize;

/// One instruction of a circuit program.
///
/// Angles are in radians. `Rx(θ) = exp(-iθX/2)`, `Rz(θ) = exp(-iθZ/2)`,
/// `Phase(λ) = diag(1, e^{iλ})` and `CPhase(θ)` multiplies `|11⟩` by `e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    H(QubitIndex),
    X(QubitIndex),
    Rx(QubitIndex, f64),
    Rz(QubitIndex, f64),
    Phase(QubitIndex, f64),
    Cnot { control: QubitIndex, target: QubitIndex },
    CPhase(QubitIndex, QubitIndex, f64),
    Swap(QubitIndex, QubitIndex),
    /// Non-selective measurement of one qubit followed by reset to `|0⟩`.
    MeasureReset(QubitIndex),
}

impl GateOp {
    pub fn targets(&self) -> ([QubitIndex; 2], usize) {
        match *self {
            GateOp::H(q)
            | GateOp::X(q)
            | GateOp::Rx(q, _)
            | GateOp::Rz(q, _)
            | GateOp::Phase(q, _)
            | GateOp::MeasureReset(q) => ([q, q], 1),
            GateOp::Cnot { control, target } => ([control, target], 2),
            GateOp::CPhase(a, b, _) | GateOp::Swap(a, b) => ([a, b], 2),
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = QubitIndex> {
        let (t, n) = self.targets();
        t.into_iter().take(n)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.targets().1 == 2
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, GateOp::MeasureReset(_))
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            GateOp::Rz(..) | GateOp::Phase(..) | GateOp::CPhase(..)
        )
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateOp::Rx(_, a) | GateOp::Rz(_, a) | GateOp::Phase(_, a) | GateOp::CPhase(_, _, a) => {
                Some(a)
            }
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateOp::H(_) => "H",
            GateOp::X(_) => "X",
            GateOp::Rx(..) => "RX",
            GateOp::Rz(..) => "RZ",
            GateOp::Phase(..) => "P",
            GateOp::Cnot { .. } => "CNOT",
            GateOp::CPhase(..) => "CP",
            GateOp::Swap(..) => "SWAP",
            GateOp::MeasureReset(_) => "MR",
        }
    }

    /// Checks that every target is below `n_qubits` and that two-qubit targets differ.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
        }
        let ([a, b], n) = self.targets();
        if n == 2 && a == b {
            return Err(Error::Validation(format!(
                "{} has duplicate target {a}",
                self.name()
            )));
        }
        Ok(())
    }

    /// The inverse gate, `None` for the measurement channel.
    pub fn inverse(&self) -> Option<GateOp> {
        Some(match *self {
            GateOp::Rx(q, a) => GateOp::Rx(q, -a),
            GateOp::Rz(q, a) => GateOp::Rz(q, -a),
            GateOp::Phase(q, a) => GateOp::Phase(q, -a),
            GateOp::CPhase(p, q, a) => GateOp::CPhase(p, q, -a),
            GateOp::MeasureReset(_) => return None,
            g => g,
        })
    }

    /// Entry-wise complex conjugate of the gate's unitary. Every gate in the set
    /// has a real matrix up to its angle sign, so this is the same as [`inverse`]
    /// for rotations and the identity map for the rest.
    ///
    /// [`inverse`]: GateOp::inverse
    pub fn conjugate(&self) -> GateOp {
        match *self {
            GateOp::MeasureReset(q) => GateOp::MeasureReset(q),
            g => g.inverse().expect("unitary gate"),
        }
    }

    /// Same gate with every qubit index moved up by `offset`.
    pub fn shifted(&self, offset: usize) -> GateOp {
        match *self {
            GateOp::H(q) => GateOp::H(q + offset),
            GateOp::X(q) => GateOp::X(q + offset),
            GateOp::Rx(q, a) => GateOp::Rx(q + offset, a),
            GateOp::Rz(q, a) => GateOp::Rz(q + offset, a),
            GateOp::Phase(q, a) => GateOp::Phase(q + offset, a),
            GateOp::Cnot { control, target } => GateOp::Cnot {
                control: control + offset,
                target: target + offset,
            },
            GateOp::CPhase(a, b, t) => GateOp::CPhase(a + offset, b + offset, t),
            GateOp::Swap(a, b) => GateOp::Swap(a + offset, b + offset),
            GateOp::MeasureReset(q) => GateOp::MeasureReset(q + offset),
        }
    }

    /// 2x2 matrix of a single-qubit unitary, row-major.
    pub(crate) fn matrix_1q(&self) -> Option<[[Complex64; 2]; 2]> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Some(match *self {
            GateOp::H(_) => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            GateOp::X(_) => [[zero, one], [one, zero]],
            GateOp::Rx(_, a) => {
                let c = Complex64::new((a / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(a / 2.0).sin());
                [[c, s], [s, c]]
            }
            GateOp::Rz(_, a) => [
                [Complex64::from_polar(1.0, -a / 2.0), zero],
                [zero, Complex64::from_polar(1.0, a / 2.0)],
            ],
            GateOp::Phase(_, a) => [[one, zero], [zero, Complex64::from_polar(1.0, a)]],
            _ => return None,
        })
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Some(a) = self.angle() {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_out_of_range_and_duplicates() {
        assert!(GateOp::H(2).validate(3).is_ok());
        assert!(matches!(
            GateOp::H(3).validate(3),
            Err(Error::QubitIndex { index: 3, .. })
        ));
        assert!(GateOp::Swap(1, 1).validate(3).is_err());
        assert!(GateOp::Cnot { control: 0, target: 0 }.validate(3).is_err());
    }

    #[test]
    fn inverse_negates_angles() {
        assert_eq!(GateOp::Rz(0, 0.3).inverse(), Some(GateOp::Rz(0, -0.3)));
        assert_eq!(GateOp::H(1).inverse(), Some(GateOp::H(1)));
        assert_eq!(GateOp::MeasureReset(0).inverse(), None);
    }

    #[test]
    fn display_lists_kind_targets_angle() {
        assert_eq!(GateOp::CPhase(0, 2, 0.5).to_string(), "CP 0 2 0.5");
        assert_eq!(GateOp::X(4).to_string(), "X 4");
    }
}
