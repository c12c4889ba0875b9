//! Factored continuous-time transfer functions.
//!
//! A [`RationalTF`] is kept in Bode (unity-DC-factor) form
//!
//! ```text
//!            Π (1 + s/ω_z) · Π (1 + 2ζ s/ω_n + s²/ω_n²)
//! T(s) = k · ------------------------------------------
//!            s^m · Π (1 + s/ω_p) · Π (1 + 2ζ s/ω_n + s²/ω_n²)
//! ```
//!
//! so that `k` is the gain of `s^m T(s)` at `s = 0`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One numerator or denominator factor with unity value at `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// `1 + s/ω`.
    Real(f64),
    /// `1 + 2ζ s/ω_n + s²/ω_n²`.
    Quadratic { omega_n: f64, zeta: f64 },
}

impl Factor {
    pub fn degree(&self) -> usize {
        match self {
            Factor::Real(_) => 1,
            Factor::Quadratic { .. } => 2,
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        match *self {
            Factor::Real(w) => 1.0 + s / w,
            Factor::Quadratic { omega_n, zeta } => {
                let x = s / omega_n;
                1.0 + 2.0 * zeta * x + x * x
            }
        }
    }

    /// Coefficients in ascending powers of `s`.
    pub fn coefficients(&self) -> Vec<f64> {
        match *self {
            Factor::Real(w) => vec![1.0, 1.0 / w],
            Factor::Quadratic { omega_n, zeta } => {
                vec![1.0, 2.0 * zeta / omega_n, 1.0 / (omega_n * omega_n)]
            }
        }
    }

    /// Leading (highest-power) coefficient.
    fn leading(&self) -> f64 {
        match *self {
            Factor::Real(w) => 1.0 / w,
            Factor::Quadratic { omega_n, .. } => 1.0 / (omega_n * omega_n),
        }
    }

    /// `d/ds ln(factor)` at `s = 0`.
    fn log_slope_at_origin(&self) -> f64 {
        match *self {
            Factor::Real(w) => 1.0 / w,
            Factor::Quadratic { omega_n, zeta } => 2.0 * zeta / omega_n,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Factor::Real(w) => w.is_finite() && w > 0.0,
            Factor::Quadratic { omega_n, zeta } => {
                omega_n.is_finite() && omega_n > 0.0 && zeta.is_finite() && zeta > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "corner frequencies and damping must be positive and finite, got {self:?}"
            )))
        }
    }
}

/// Factored real-rational transfer function.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    scale: f64,
    zeros: Vec<Factor>,
    poles: Vec<Factor>,
    integrators: u32,
}

impl RationalTF {
    /// `scale · Π(1 + s/z) / (s^integrators · Π(1 + s/p))` with real corners.
    pub fn new(scale: f64, zeros: &[f64], poles: &[f64], integrators: u32) -> Result<Self> {
        Self::from_factors(
            scale,
            zeros.iter().map(|&w| Factor::Real(w)).collect(),
            poles.iter().map(|&w| Factor::Real(w)).collect(),
            integrators,
        )
    }

    pub fn from_factors(
        scale: f64,
        zeros: Vec<Factor>,
        poles: Vec<Factor>,
        integrators: u32,
    ) -> Result<Self> {
        if !scale.is_finite() {
            return Err(Error::invalid("transfer-function gain must be finite"));
        }
        for f in zeros.iter().chain(poles.iter()) {
            f.validate()?;
        }
        let tf = RationalTF {
            scale,
            zeros,
            poles,
            integrators,
        };
        if tf.numerator_degree() > tf.denominator_degree() {
            return Err(Error::invalid("transfer function must be proper"));
        }
        Ok(tf)
    }

    /// A pure gain.
    pub fn constant(k: f64) -> Self {
        RationalTF {
            scale: k,
            zeros: vec![],
            poles: vec![],
            integrators: 0,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn zeros(&self) -> &[Factor] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Factor] {
        &self.poles
    }

    pub fn integrators(&self) -> u32 {
        self.integrators
    }

    pub fn numerator_degree(&self) -> usize {
        self.zeros.iter().map(Factor::degree).sum()
    }

    pub fn denominator_degree(&self) -> usize {
        self.poles.iter().map(Factor::degree).sum::<usize>() + self.integrators as usize
    }

    pub fn relative_degree(&self) -> usize {
        self.denominator_degree() - self.numerator_degree()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut v = Complex64::new(self.scale, 0.0);
        for z in &self.zeros {
            v *= z.eval(s);
        }
        for p in &self.poles {
            v /= p.eval(s);
        }
        for _ in 0..self.integrators {
            v /= s;
        }
        v
    }

    /// `T(jω)`.
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    /// Value of `T(s)` as `|s| → ∞`; zero unless the relative degree is zero.
    pub fn high_frequency_gain(&self) -> f64 {
        if self.relative_degree() > 0 {
            return 0.0;
        }
        let num: f64 = self.zeros.iter().map(Factor::leading).product();
        let den: f64 = self.poles.iter().map(Factor::leading).product();
        self.scale * num / den
    }

    /// Gain of `s^m T(s)` at the origin, together with its logarithmic slope there.
    pub(crate) fn origin_expansion(&self) -> (f64, f64) {
        let slope = self.zeros.iter().map(Factor::log_slope_at_origin).sum::<f64>()
            - self.poles.iter().map(Factor::log_slope_at_origin).sum::<f64>();
        (self.scale, slope)
    }

    /// Numerator coefficients, ascending powers of `s`.
    pub fn numerator(&self) -> Vec<f64> {
        let mut acc = vec![self.scale];
        for z in &self.zeros {
            acc = poly_mul(&acc, &z.coefficients());
        }
        acc
    }

    /// Denominator coefficients, ascending powers of `s`.
    pub fn denominator(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.integrators as usize];
        acc.push(1.0);
        for p in &self.poles {
            acc = poly_mul(&acc, &p.coefficients());
        }
        acc
    }
}

impl Mul for &RationalTF {
    type Output = RationalTF;

    fn mul(self, rhs: &RationalTF) -> RationalTF {
        RationalTF {
            scale: self.scale * rhs.scale,
            zeros: self.zeros.iter().chain(&rhs.zeros).copied().collect(),
            poles: self.poles.iter().chain(&rhs.poles).copied().collect(),
            integrators: self.integrators + rhs.integrators,
        }
    }
}

impl Mul<f64> for RationalTF {
    type Output = RationalTF;

    fn mul(mut self, k: f64) -> RationalTF {
        self.scale *= k;
        self
    }
}

pub(crate) fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
