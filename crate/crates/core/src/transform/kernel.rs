//! The csch kernel `α(D, p)` of the F-transform and its Taylor pieces.
//!
//! `α(D, p) = 2π csch(2πp) − π e^{πp(1−2D)} csch(πp) = Σ (−1)^k α_k(D) p^k`.

use std::f64::consts::PI;

use crate::units::{DutyCycle, NormalizedFreq};

/// Below this `p` both csch terms are ~1/p and their difference is taken
/// from the Taylor expansion instead.
pub const SMALL_P_THRESHOLD: f64 = 1e-3;

/// Highest Taylor order used on the small-`p` branch.
pub const TAYLOR_ORDER: usize = 6;

// α_k(D) = π^{k+1} · P_k(D); P_k in ascending powers of D. Exact rationals
// from the symbolic expansion of the closed form.
const TAYLOR_POLY: [&[f64]; 8] = [
    &[-1.0, 2.0],
    &[1.0, -2.0, 2.0],
    &[0.0, 2.0 / 3.0, -2.0, 4.0 / 3.0],
    &[-1.0 / 3.0, 0.0, 2.0 / 3.0, -4.0 / 3.0, 2.0 / 3.0],
    &[0.0, -2.0 / 45.0, 0.0, 4.0 / 9.0, -2.0 / 3.0, 4.0 / 15.0],
    &[2.0 / 15.0, 0.0, -2.0 / 45.0, 0.0, 2.0 / 9.0, -4.0 / 15.0, 4.0 / 45.0],
    &[0.0, 4.0 / 945.0, 0.0, -4.0 / 135.0, 0.0, 4.0 / 45.0, -4.0 / 45.0, 8.0 / 315.0],
    &[
        -17.0 / 315.0,
        0.0,
        4.0 / 945.0,
        0.0,
        -2.0 / 135.0,
        0.0,
        4.0 / 135.0,
        -8.0 / 315.0,
        2.0 / 315.0,
    ],
];

/// `α₀(D) = π(2D − 1)`, the value of `α` at `p = 0`.
pub fn alpha0(d: DutyCycle) -> f64 {
    PI * (2.0 * d.get() - 1.0)
}

/// `α₁(D) = π²(2D² − 2D + 1)`.
pub fn alpha1(d: DutyCycle) -> f64 {
    let d = d.get();
    PI * PI * (2.0 * d * d - 2.0 * d + 1.0)
}

/// Taylor coefficient `α_k(D)` for `k ≤ 7`.
///
/// # Panics
/// If `k > 7`.
pub fn taylor_coefficient(k: usize, d: DutyCycle) -> f64 {
    let poly = TAYLOR_POLY[k];
    let x = d.get();
    let v = poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
    PI.powi(k as i32 + 1) * v
}

fn taylor_sum(d: DutyCycle, p: f64, from: usize) -> f64 {
    let mut sum = 0.0;
    let mut pk = p.powi(from as i32);
    for k in from..=TAYLOR_ORDER {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * taylor_coefficient(k, d) * pk;
        pk *= p;
    }
    sum
}

/// `α(D, p)`.
pub fn alpha(d: DutyCycle, p: NormalizedFreq) -> f64 {
    let p = p.get();
    if p < SMALL_P_THRESHOLD {
        return taylor_sum(d, p, 0);
    }
    // Written with decaying exponentials so that large p neither overflows
    // nor loses the ratio.
    let e2 = (-2.0 * PI * p).exp();
    let first = 4.0 * PI * e2 / -(-4.0 * PI * p).exp_m1();
    let second = 2.0 * PI * (-2.0 * PI * p * d.get()).exp() / -(-2.0 * PI * p).exp_m1();
    first - second
}

/// Correction term `c(D, p) = α(D, p) − α₀(D) + α₁(D) p`.
pub fn correction(d: DutyCycle, p: NormalizedFreq) -> f64 {
    if p.get() < SMALL_P_THRESHOLD {
        return taylor_sum(d, p.get(), 2);
    }
    alpha(d, p) - alpha0(d) + alpha1(d) * p.get()
}

/// `α₀(D) − α(D, p)`: the scaled L-plot surface of the pole-integrator case.
pub fn pole_integrator_kernel(d: DutyCycle, p: NormalizedFreq) -> f64 {
    if p.get() < SMALL_P_THRESHOLD {
        return -taylor_sum(d, p.get(), 1);
    }
    alpha0(d) - alpha(d, p)
}
