//! In-place amplitude kernels over a dense vector of `2^n` amplitudes.

use num_complex::Complex64;

use super::gate::GateOp;

pub(crate) fn apply_unitary(amps: &mut [Complex64], gate: &GateOp) {
    match *gate {
        GateOp::X(q) => apply_x(amps, q),
        GateOp::Phase(q, a) => apply_phase(amps, q, a),
        GateOp::Cnot { control, target } => apply_cnot(amps, control, target),
        GateOp::CPhase(a, b, t) => apply_cphase(amps, a, b, t),
        GateOp::Swap(a, b) => apply_swap(amps, a, b),
        GateOp::Rz(q, a) => {
            let lo = Complex64::from_polar(1.0, -a / 2.0);
            let hi = Complex64::from_polar(1.0, a / 2.0);
            apply_diag_1q(amps, q, lo, hi);
        }
        GateOp::H(q) | GateOp::Rx(q, _) => {
            apply_1q(amps, q, &gate.matrix_1q().expect("single-qubit gate"));
        }
        GateOp::MeasureReset(_) => unreachable!("channels are handled by the state"),
    }
}

pub(crate) fn apply_1q(amps: &mut [Complex64], q: usize, m: &[[Complex64; 2]; 2]) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        }
    }
}

fn apply_diag_1q(amps: &mut [Complex64], q: usize, d0: Complex64, d1: Complex64) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        lo.iter_mut().for_each(|a| *a *= d0);
        hi.iter_mut().for_each(|a| *a *= d1);
    }
}

fn apply_x(amps: &mut [Complex64], q: usize) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        lo.swap_with_slice(hi);
    }
}

fn apply_phase(amps: &mut [Complex64], q: usize, angle: f64) {
    let ph = Complex64::from_polar(1.0, angle);
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(stride << 1) {
        chunk[stride..].iter_mut().for_each(|a| *a *= ph);
    }
}

fn apply_cphase(amps: &mut [Complex64], a: usize, b: usize, angle: f64) {
    let ph = Complex64::from_polar(1.0, angle);
    let mask = (1usize << a) | (1usize << b);
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    // enumerate indices with both bits set by inserting ones at positions lo and hi
    let quarter = amps.len() >> 2;
    for k in 0..quarter {
        let i = insert_zero_bit(insert_zero_bit(k, lo), hi) | mask;
        amps[i] *= ph;
    }
}

fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let (hi, lo) = if control > target { (control, target) } else { (target, control) };
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    let quarter = amps.len() >> 2;
    for k in 0..quarter {
        let i = insert_zero_bit(insert_zero_bit(k, lo), hi) | cbit;
        amps.swap(i, i | tbit);
    }
}

fn apply_swap(amps: &mut [Complex64], a: usize, b: usize) {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    let abit = 1usize << a;
    let bbit = 1usize << b;
    let quarter = amps.len() >> 2;
    for k in 0..quarter {
        let i = insert_zero_bit(insert_zero_bit(k, lo), hi);
        amps.swap(i | abit, i | bbit);
    }
}

#[inline]
fn insert_zero_bit(k: usize, pos: usize) -> usize {
    let low = k & ((1usize << pos) - 1);
    ((k >> pos) << (pos + 1)) | low
}

/// Probability mass on basis states with bit `q` set.
pub(crate) fn prob_one(amps: &[Complex64], q: usize) -> f64 {
    let stride = 1usize << q;
    amps.chunks_exact(stride << 1)
        .flat_map(|c| c[stride..].iter())
        .map(|a| a.norm_sqr())
        .sum()
}

/// Projects onto bit `q` = `outcome` (zeroing the other half). With
/// `reset` a surviving 1-half is moved down to bit value 0.
pub(crate) fn project(amps: &mut [Complex64], q: usize, outcome: bool, reset: bool) {
    let stride = 1usize << q;
    let zero = Complex64::new(0.0, 0.0);
    for chunk in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        if outcome {
            if reset {
                lo.copy_from_slice(hi);
                hi.fill(zero);
            } else {
                lo.fill(zero);
            }
        } else {
            hi.fill(zero);
        }
    }
}
