//! Brute-force summation of the F-transform
//!
//! ```text
//! F[T] = 2 Re Σ_{k≥1} (1 − e^{j2πkD}) T(jkω_s) − T(j(k − ½)ω_s)
//! ```
//!
//! This is the independent oracle for every closed form in the crate: it only
//! ever evaluates `T` on the imaginary axis.
//!
//! The sum is split into a non-oscillating part `Σ T(jkω_s) − T(j(k−½)ω_s)`,
//! whose terms decay at least like `1/k²`, and an oscillating part
//! `Σ e^{j2πkD} T(jkω_s)`, which for strictly proper `T` only converges
//! conditionally. The non-oscillating tail is replaced by the midpoint-rule
//! integral beyond the last term; the oscillating tail by repeated summation
//! by parts (`Σ_{k≥m} z^k a_k ≈ z^m a_m/(1−z) + z^{m+1}Δa/(1−z)² + …`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tf::RationalTF;
use crate::units::DutyCycle;

/// Default number of harmonics.
pub const DEFAULT_TERMS: usize = 10_000;

/// Relative agreement required between the estimates at `K` and `K/2`.
pub const CAUCHY_TOLERANCE: f64 = 1e-7;

const TAIL_QUADRATURE_POINTS: usize = 1024;

fn j(omega: f64) -> Complex64 {
    Complex64::new(0.0, omega)
}

/// Tail-corrected estimate of the complex sum using the first `terms` harmonics.
fn estimate<F>(t: &F, z: Option<Complex64>, omega_s: f64, terms: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let a = |k: f64| t(j(k * omega_s));
    let b = |k: f64| t(j((k - 0.5) * omega_s));

    let mut steady = Complex64::new(0.0, 0.0);
    let mut osc = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 1..=terms {
        let kf = k as f64;
        let ak = a(kf);
        steady += ak - b(kf);
        if let Some(z) = z {
            zk *= z;
            osc += zk * ak;
        }
    }

    // ∫_{K+½}^∞ g(x) dx with x = X/u, u ∈ (0, 1], composite midpoint in u.
    let big_x = terms as f64 + 0.5;
    let h = 1.0 / TAIL_QUADRATURE_POINTS as f64;
    let mut steady_tail = Complex64::new(0.0, 0.0);
    for i in 0..TAIL_QUADRATURE_POINTS {
        let u = (i as f64 + 0.5) * h;
        let x = big_x / u;
        steady_tail += (a(x) - b(x)) * (big_x / (u * u));
    }
    steady_tail *= h;

    let mut osc_tail = Complex64::new(0.0, 0.0);
    if let Some(z) = z {
        let m = terms as f64 + 1.0;
        let (a0, a1, a2) = (a(m), a(m + 1.0), a(m + 2.0));
        let w = 1.0 / (1.0 - z);
        let zm = z.powf(m);
        osc_tail = zm * a0 * w
            + zm * z * (a1 - a0) * w * w
            + zm * z * z * (a2 - 2.0 * a1 + a0) * w * w * w;
    }

    (steady + steady_tail) - (osc + osc_tail)
}

/// F-transform of an arbitrary frequency response `t(s)` by direct summation.
///
/// `t` must be strictly proper; a direct feedthrough makes the sum diverge and
/// is reported as [`Error::NonConvergence`]. Use [`f_transform_series_tf`] to
/// split off the constant of a biproper [`RationalTF`].
pub fn f_transform_series<F>(t: F, d: DutyCycle, omega_s: f64, terms: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if terms < 2 {
        return Err(Error::invalid("series needs at least two terms"));
    }
    if !(omega_s > 0.0 && omega_s.is_finite()) {
        return Err(Error::invalid("omega_s must be positive"));
    }
    let z = Complex64::from_polar(1.0, 2.0 * PI * d.get());
    // At D ∈ {0, 1} the factor (1 − z^k) vanishes identically.
    let z = if (1.0 - z).norm() < 1e-12 { None } else { Some(z) };

    // Terms that do not decay cannot be summed.
    let ak = |k: f64| t(j(k * omega_s)).norm();
    let late = ak(terms as f64);
    let early = ak((terms / 10).max(1) as f64);
    let scale = ak(1.0).max(early).max(f64::MIN_POSITIVE);
    if late > 0.5 * early && late > 1e-12 * scale {
        return Err(Error::NonConvergence {
            terms,
            delta: late,
        });
    }

    let full = 2.0 * estimate(&t, z, omega_s, terms).re;
    let half = 2.0 * estimate(&t, z, omega_s, terms / 2).re;
    let delta = (full - half).abs();
    if !full.is_finite() || delta > CAUCHY_TOLERANCE * (1.0 + full.abs()) {
        return Err(Error::NonConvergence { terms, delta });
    }
    Ok(full)
}

/// Series F-transform of a factored transfer function.
///
/// A biproper `T` is split as `T(∞) + (T − T(∞))`, with `F[const] = −const`.
pub fn f_transform_series_tf(tf: &RationalTF, d: DutyCycle, omega_s: f64, terms: usize) -> Result<f64> {
    if tf.relative_degree() > 0 {
        return f_transform_series(|s| tf.eval(s), d, omega_s, terms);
    }
    // Subtracting T(∞) from T(jω) cancels catastrophically at the large ω the
    // tail quadrature visits, so the remainder is formed on the coefficients.
    let k_inf = tf.high_frequency_gain();
    let den = tf.denominator();
    let mut num = tf.numerator();
    for (n, d) in num.iter_mut().zip(&den) {
        *n -= k_inf * d;
    }
    num.pop();
    let horner = |c: &[f64], s: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * s + x);
    let rest = f_transform_series(|s| horner(&num, s) / horner(&den, s), d, omega_s, terms)?;
    Ok(rest - k_inf)
}
