//! Closed-form F-transforms of the nine first-order loop-gain shapes.

use crate::error::{Error, Result};
use crate::tf::RationalTF;
use crate::units::{DutyCycle, NormalizedFreq};

use super::kernel::{alpha, alpha0, alpha1, correction};

/// Catalog of first-order loop gains with known F-transforms.
///
/// `p = ω_p/ω_s` and `z = ω_z/ω_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableCase {
    /// `1/(s + ω_p)`
    C1 { p: NormalizedFreq },
    /// `1/s`
    C2,
    /// `1/(1 + s/ω_p)`
    C3 { p: NormalizedFreq },
    /// `(1 + s/ω_z)/(1 + s/ω_p)`
    C4 { p: NormalizedFreq, z: NormalizedFreq },
    /// `1/(s(1 + s/ω_p))`
    C5 { p: NormalizedFreq },
    /// `1/s²`
    C6,
    /// `(1 + s/ω_z)/s²`
    C7 { z: NormalizedFreq },
    /// `(1 + s/ω_z)/(s(1 + s/ω_p))`
    C8 { p: NormalizedFreq, z: NormalizedFreq },
    /// `(1 + s/ω_z)/(s²(1 + s/ω_p))`
    C9 { p: NormalizedFreq, z: NormalizedFreq },
}

impl TableCase {
    pub fn id(&self) -> &'static str {
        match self {
            TableCase::C1 { .. } => "C1",
            TableCase::C2 => "C2",
            TableCase::C3 { .. } => "C3",
            TableCase::C4 { .. } => "C4",
            TableCase::C5 { .. } => "C5",
            TableCase::C6 => "C6",
            TableCase::C7 { .. } => "C7",
            TableCase::C8 { .. } => "C8",
            TableCase::C9 { .. } => "C9",
        }
    }

    pub fn pole(&self) -> Option<NormalizedFreq> {
        match *self {
            TableCase::C1 { p }
            | TableCase::C3 { p }
            | TableCase::C4 { p, .. }
            | TableCase::C5 { p }
            | TableCase::C8 { p, .. }
            | TableCase::C9 { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn zero(&self) -> Option<NormalizedFreq> {
        match *self {
            TableCase::C4 { z, .. }
            | TableCase::C7 { z }
            | TableCase::C8 { z, .. }
            | TableCase::C9 { z, .. } => Some(z),
            _ => None,
        }
    }

    /// The transfer function this case stands for, at switching frequency `omega_s`.
    pub fn transfer_function(&self, omega_s: f64) -> Result<RationalTF> {
        let wp = |p: NormalizedFreq| p.get() * omega_s;
        let wz = |z: NormalizedFreq| z.get() * omega_s;
        match *self {
            TableCase::C1 { p } => RationalTF::new(1.0 / wp(p), &[], &[wp(p)], 0),
            TableCase::C2 => RationalTF::new(1.0, &[], &[], 1),
            TableCase::C3 { p } => RationalTF::new(1.0, &[], &[wp(p)], 0),
            TableCase::C4 { p, z } => RationalTF::new(1.0, &[wz(z)], &[wp(p)], 0),
            TableCase::C5 { p } => RationalTF::new(1.0, &[], &[wp(p)], 1),
            TableCase::C6 => RationalTF::new(1.0, &[], &[], 2),
            TableCase::C7 { z } => RationalTF::new(1.0, &[wz(z)], &[], 2),
            TableCase::C8 { p, z } => RationalTF::new(1.0, &[wz(z)], &[wp(p)], 1),
            TableCase::C9 { p, z } => RationalTF::new(1.0, &[wz(z)], &[wp(p)], 2),
        }
    }
}

fn nonzero(z: NormalizedFreq) -> Result<f64> {
    if z.get() > 0.0 {
        Ok(z.get())
    } else {
        Err(Error::invalid("zero frequency z must be positive"))
    }
}

/// F-transform of a catalog case, from its closed form.
pub fn f_transform_case(case: TableCase, d: DutyCycle, omega_s: f64) -> Result<f64> {
    if !(omega_s > 0.0 && omega_s.is_finite()) {
        return Err(Error::invalid("omega_s must be positive"));
    }
    let ws = omega_s;
    let a0 = alpha0(d);
    let a1 = alpha1(d);
    let v = match case {
        TableCase::C1 { p } => alpha(d, p) / ws,
        TableCase::C2 => a0 / ws,
        TableCase::C3 { p } => p.get() * alpha(d, p),
        TableCase::C4 { p, z } => {
            let r = p.get() / nonzero(z)?;
            -r + p.get() * (1.0 - r) * alpha(d, p)
        }
        TableCase::C5 { p } => (a1 * p.get() - correction(d, p)) / ws,
        TableCase::C6 => a1 / (ws * ws),
        TableCase::C7 { z } => (a0 / nonzero(z)? + a1) / (ws * ws),
        TableCase::C8 { p, z } => {
            let r = p.get() / nonzero(z)?;
            (r * a0 - (r - 1.0) * (a1 * p.get() - correction(d, p))) / ws
        }
        TableCase::C9 { p, z } => {
            let z = nonzero(z)?;
            let p = p.get();
            // c/p → 0 as p → 0 (c is O(p²))
            let c_over_p = if p > 0.0 {
                correction(d, NormalizedFreq::new(p)?) / p
            } else {
                0.0
            };
            ((p / z) * a1 + c_over_p - correction(d, NormalizedFreq::new(p)?) / z) / (ws * ws)
        }
    };
    Ok(v)
}
