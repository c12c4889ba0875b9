//! Dimensionless quantities shared by the closed forms.

use std::fmt;

use crate::error::{Error, Result};

/// Fraction of the switching period spent in the on-stage.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DutyCycle(f64);

impl DutyCycle {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(DutyCycle(value))
        } else {
            Err(Error::invalid(format!("duty cycle {value} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - D`.
    pub fn complement(self) -> Self {
        DutyCycle(1.0 - self.0)
    }
}

impl TryFrom<f64> for DutyCycle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        DutyCycle::new(value)
    }
}

impl fmt::Display for DutyCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An angular frequency divided by the switching frequency `ω_s`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedFreq(f64);

impl NormalizedFreq {
    pub const ZERO: NormalizedFreq = NormalizedFreq(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(NormalizedFreq(value))
        } else {
            Err(Error::invalid(format!(
                "normalized frequency {value} must be finite and non-negative"
            )))
        }
    }

    /// Normalizes `omega` (rad/s) by `omega_s` (rad/s).
    pub fn from_angular(omega: f64, omega_s: f64) -> Result<Self> {
        if omega_s.is_nan() || omega_s <= 0.0 {
            return Err(Error::invalid("switching frequency must be positive"));
        }
        NormalizedFreq::new(omega / omega_s)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NormalizedFreq {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        NormalizedFreq::new(value)
    }
}

impl fmt::Display for NormalizedFreq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duty_bounds() {
        assert!(DutyCycle::new(0.0).is_ok());
        assert!(DutyCycle::new(1.0).is_ok());
        assert!(DutyCycle::new(-1e-12).is_err());
        assert!(DutyCycle::new(1.0 + 1e-12).is_err());
        assert!(DutyCycle::new(f64::NAN).is_err());
        assert_eq!(DutyCycle::new(0.3).unwrap().complement().get(), 0.7);
    }

    #[test]
    fn freq_bounds() {
        assert!(NormalizedFreq::new(0.0).is_ok());
        assert!(NormalizedFreq::new(-0.1).is_err());
        assert!(NormalizedFreq::new(f64::INFINITY).is_err());
        let p = NormalizedFreq::from_angular(std::f64::consts::PI, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(p.get(), 0.5);
        assert!(NormalizedFreq::from_angular(1.0, 0.0).is_err());
    }
}
