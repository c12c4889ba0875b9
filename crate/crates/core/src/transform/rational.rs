//! F-transform of a factored transfer function by partial fractions.
//!
//! `T(s) = T(∞) + Σ r_i/(s + ω_i) + c₁/s + c₂/s²`, each piece mapped onto a
//! catalog case (`F[1] = −1`, C1, C2, C6) and summed by linearity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tf::{Factor, RationalTF};
use crate::units::{DutyCycle, NormalizedFreq};

use super::table::{f_transform_case, TableCase};

/// Poles closer than this (relative) are treated as repeated.
pub const REPEATED_POLE_TOLERANCE: f64 = 1e-9;

/// First-order partial-fraction expansion of a [`RationalTF`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions {
    /// `T(∞)`.
    pub direct: f64,
    /// `(ω_i, r_i)` for each term `r_i/(s + ω_i)`.
    pub simple: Vec<(f64, f64)>,
    /// Coefficients of `1/s` and `1/s²`.
    pub origin: [f64; 2],
}

impl PartialFractions {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut v = Complex64::new(self.direct, 0.0);
        for &(w, r) in &self.simple {
            v += r / (s + w);
        }
        v + self.origin[0] / s + self.origin[1] / (s * s)
    }
}

fn real_poles(tf: &RationalTF) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(tf.poles().len() + 1);
    for f in tf.poles() {
        match *f {
            Factor::Real(w) => out.push(w),
            Factor::Quadratic { omega_n, zeta } => {
                if zeta < 1.0 {
                    return Err(Error::UnsupportedStructure(format!(
                        "complex pole pair (ω_n = {omega_n}, ζ = {zeta})"
                    )));
                }
                let r = (zeta * zeta - 1.0).sqrt();
                out.push(omega_n * (zeta - r));
                out.push(omega_n * (zeta + r));
            }
        }
    }
    for (i, a) in out.iter().enumerate() {
        for b in &out[i + 1..] {
            if (a - b).abs() <= REPEATED_POLE_TOLERANCE * a.max(*b) {
                return Err(Error::UnsupportedStructure(format!(
                    "repeated pole near ω = {a}"
                )));
            }
        }
    }
    Ok(out)
}

pub fn partial_fractions(tf: &RationalTF) -> Result<PartialFractions> {
    let m = tf.integrators();
    if m > 2 {
        return Err(Error::UnsupportedStructure(format!(
            "{m} poles at the origin (at most 2 supported)"
        )));
    }
    let poles = real_poles(tf)?;
    let numerator = |s: Complex64| {
        tf.zeros()
            .iter()
            .fold(Complex64::new(tf.scale(), 0.0), |acc, z| acc * z.eval(s))
    };

    let simple = poles
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let s = Complex64::new(-w, 0.0);
            let mut den = s.powu(m);
            for (k, &other) in poles.iter().enumerate() {
                if k != i {
                    den *= 1.0 - w / other;
                }
            }
            (w, (numerator(s) * w / den).re)
        })
        .collect();

    // s^m T(s) = h(s): h(0) is the Bode gain, h'(0) = h(0) · (log slope).
    let (h0, slope) = tf.origin_expansion();
    let origin = match m {
        0 => [0.0, 0.0],
        1 => [h0, 0.0],
        _ => [h0 * slope, h0],
    };

    Ok(PartialFractions {
        direct: tf.high_frequency_gain(),
        simple,
        origin,
    })
}

/// F-transform of `tf` assembled from catalog cases.
///
/// Fails with [`Error::UnsupportedStructure`] for complex or repeated
/// non-origin poles, or more than two integrators; the series route
/// handles those.
pub fn f_transform_rational(tf: &RationalTF, d: DutyCycle, omega_s: f64) -> Result<f64> {
    let pf = partial_fractions(tf)?;
    let mut total = -pf.direct;
    for &(w, r) in &pf.simple {
        let p = NormalizedFreq::from_angular(w, omega_s)?;
        // C1 is 1/(s + ω_p)
        total += r * f_transform_case(TableCase::C1 { p }, d, omega_s)?;
    }
    if pf.origin[0] != 0.0 {
        total += pf.origin[0] * f_transform_case(TableCase::C2, d, omega_s)?;
    }
    if pf.origin[1] != 0.0 {
        total += pf.origin[1] * f_transform_case(TableCase::C6, d, omega_s)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::kernel::alpha1;
    use approx::assert_relative_eq;

    fn dc(x: f64) -> DutyCycle {
        DutyCycle::new(x).unwrap()
    }
    fn nf(x: f64) -> NormalizedFreq {
        NormalizedFreq::new(x).unwrap()
    }

    #[test]
    fn expansion_reconstructs_tf() {
        let tf = RationalTF::from_factors(
            4.0,
            vec![Factor::Real(3.0), Factor::Real(0.7)],
            vec![Factor::Real(2.0), Factor::Quadratic { omega_n: 5.0, zeta: 1.3 }],
            1,
        )
        .unwrap();
        let pf = partial_fractions(&tf).unwrap();
        for &w in &[0.3, 1.0, 7.0] {
            let s = Complex64::new(0.1, w);
            let a = tf.eval(s);
            let b = pf.eval(s);
            assert_relative_eq!(a.re, b.re, max_relative = 1e-10);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-10);
        }
    }

    #[test]
    fn c8_from_c1_and_c2() {
        let ws = 2.0;
        let (p, z) = (nf(0.4), nf(1.3));
        let tf = TableCase::C8 { p, z }.transfer_function(ws).unwrap();
        let via_pf = f_transform_rational(&tf, dc(0.35), ws).unwrap();
        let table = f_transform_case(TableCase::C8 { p, z }, dc(0.35), ws).unwrap();
        assert_relative_eq!(via_pf, table, max_relative = 1e-12);
    }

    #[test]
    fn double_integrator() {
        let tf = RationalTF::new(1.0, &[], &[], 2).unwrap();
        let v = f_transform_rational(&tf, dc(0.3), 3.0).unwrap();
        assert_relative_eq!(v, alpha1(dc(0.3)) / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn linear_combination() {
        // 2/(s + 1.5) + 3/s  =  (5s + 4.5)/(s(s + 1.5))  =  3 (1 + s/0.9)/(s (1 + s/1.5))
        let ws = 1.0;
        let tf = RationalTF::new(3.0, &[0.9], &[1.5], 1).unwrap();
        let d = dc(0.7);
        let expect = 2.0 * f_transform_case(TableCase::C1 { p: nf(1.5) }, d, ws).unwrap()
            + 3.0 * f_transform_case(TableCase::C2, d, ws).unwrap();
        assert_relative_eq!(f_transform_rational(&tf, d, ws).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn unsupported_structures() {
        let complex = RationalTF::from_factors(1.0, vec![], vec![Factor::Quadratic { omega_n: 1.0, zeta: 0.2 }], 0)
            .unwrap();
        assert!(matches!(
            f_transform_rational(&complex, dc(0.5), 1.0),
            Err(Error::UnsupportedStructure(_))
        ));
        let repeated = RationalTF::new(1.0, &[], &[2.0, 2.0 * (1.0 + 1e-12)], 0).unwrap();
        assert!(matches!(
            f_transform_rational(&repeated, dc(0.5), 1.0),
            Err(Error::UnsupportedStructure(_))
        ));
        let triple = RationalTF::new(1.0, &[], &[], 3).unwrap();
        assert!(f_transform_rational(&triple, dc(0.5), 1.0).is_err());
    }
}
