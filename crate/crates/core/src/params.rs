use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Power-stage and modulator constants of a buck converter (SI units).
#[derive(Debug, Clone, PartialEq)]
pub struct BuckParams {
    /// Source voltage.
    pub v_s: f64,
    /// Reference voltage (current command for current-mode control).
    pub v_r: f64,
    /// Ramp valley.
    pub v_l: f64,
    /// Ramp peak.
    pub v_h: f64,
    /// Switching frequency in Hz.
    pub f_s: f64,
    pub l: f64,
    /// Output capacitance; absent for the first-order RL plant.
    pub c: Option<f64>,
    /// Load resistance.
    pub r: f64,
    /// Capacitor ESR.
    pub r_c: f64,
}

impl BuckParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.v_s, self.v_r, self.v_l, self.v_h, self.f_s, self.l, self.r, self.r_c]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("converter parameters must be finite"));
        }
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::invalid(msg)) };
        check(self.v_s > 0.0, "v_s must be positive")?;
        check(self.f_s > 0.0, "f_s must be positive")?;
        check(self.l > 0.0, "L must be positive")?;
        check(self.r > 0.0, "R must be positive")?;
        check(self.r_c >= 0.0, "R_c must be non-negative")?;
        // V_h = V_l is the ramp-free limit; only the loop-gain normalization breaks.
        check(self.v_h >= self.v_l, "V_h must not be below V_l")?;
        if let Some(c) = self.c {
            check(c.is_finite() && c > 0.0, "C must be positive")?;
        }
        Ok(())
    }

    /// Ramp amplitude `V_m = V_h − V_l`.
    pub fn ramp_amplitude(&self) -> f64 {
        self.v_h - self.v_l
    }

    /// Ramp slope `m_a = V_m / T`.
    pub fn ramp_slope(&self) -> f64 {
        self.ramp_amplitude() * self.f_s
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f_s
    }

    pub fn omega_s(&self) -> f64 {
        2.0 * PI * self.f_s
    }

    /// `ρ = R / (R + R_c)`.
    pub fn rho(&self) -> f64 {
        self.r / (self.r + self.r_c)
    }

    pub fn capacitance(&self) -> Result<f64> {
        self.c.ok_or(Error::MissingParameter("C"))
    }

    /// Ramp value `h(t)` at time `t` into the cycle.
    pub fn ramp(&self, t: f64) -> f64 {
        let frac = (t * self.f_s).rem_euclid(1.0);
        self.v_l + self.ramp_amplitude() * frac
    }
}
