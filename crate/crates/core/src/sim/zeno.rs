//! Numerical check of the projected-evolution limit behind Zeno dynamics:
//! `[P e^{-iHt/N} P]^N → P e^{-iPHPt}` as `N → ∞`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const MAX_DIM: usize = 64;

/// Operator-norm distance `‖[P e^{-iHt/N} P]^N − P e^{-iPHPt}‖₂`.
///
/// The limit operator is restricted to the range of `P`; outside it the
/// repeated projections annihilate the state, so the unrestricted
/// `e^{-iPHPt}` (which acts as the identity there) is never approached.
pub fn zeno_limit_check(h: &CMatrix, p: &CMatrix, t: f64, n: u32) -> Result<f64> {
    let dim = h.nrows();
    if !h.is_square() || p.shape() != h.shape() || dim > MAX_DIM {
        return Err(Error::Validation(format!(
            "H and P must be square of equal dimension <= {MAX_DIM}"
        )));
    }
    if n == 0 {
        return Err(Error::Validation("N must be at least 1".into()));
    }
    if max_abs(&(h - h.adjoint())) > 1e-10 {
        return Err(Error::Validation("H is not Hermitian".into()));
    }
    if max_abs(&(p * p - p)) > 1e-10 {
        return Err(Error::Validation("P is not idempotent".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let step = (h * (-i * t / n as f64)).exp();
    let projected = p * step * p;
    let zeno = matrix_power(&projected, n);
    let limit = p * (p * h * p * (-i * t)).exp();
    Ok(operator_norm(&(zeno - limit)))
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().max()
}

fn matrix_power(m: &CMatrix, mut n: u32) -> CMatrix {
    let mut result = CMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    result
}
