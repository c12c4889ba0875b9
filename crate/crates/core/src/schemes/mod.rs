//! Control schemes, their loop gains and closed-form critical conditions.

mod critical;
mod stage;
mod sweep;

pub use critical::{
    acmc_window_estimate, combined_gain, critical_acmc, critical_cmc, critical_pvmc,
    critical_pvmc_noesr, critical_pvmc_small_r, critical_rlp, critical_vmc3, harmonic_balance,
    lvalue, no_ramp_esr_boundary, no_ramp_feasible, no_ramp_feasible_esr, nominal_duty, residual,
    rlp_critical_gain, rlp_steady_duty, v2_min_ramp, v2_min_ramp_large_c, AcmcCritical,
    RLP_GAIN_RANGE,
    PWindow, RlpCritical,
};
pub(crate) use sweep::check_monotone;
pub use stage::{compensator, loop_gain_hf, power_stage_il, power_stage_vo, type3_compensator};
pub use sweep::{
    contour_data, lplot, solve_critical, DutySpec, LPlotCurve, SolveFor, Sweep, SweepVariable,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::params::BuckParams;

/// Feedback scheme wrapped around the buck power stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlScheme {
    /// Peak current mode: `y = i_c − i_L`, with `v_r` as the current command.
    Cmc,
    /// Proportional voltage mode: `y = k_p (v_r − v_o)`.
    Pvmc { k_p: f64 },
    /// Constant-frequency V² control: `y = v_r − k_p v_o`.
    Cfpvr { k_p: f64 },
    /// Average current mode with a type-II compensator acting on `v_r − R_s i_L`.
    Acmc {
        r_s: f64,
        k_c: f64,
        /// Compensator zero, rad/s.
        z_c: f64,
        /// Compensator high-frequency pole, rad/s.
        omega_p: f64,
    },
    /// Voltage mode with the type-III compensator.
    Vmc3 {
        k_c: f64,
        kappa_z: f64,
        /// Third compensator pole, rad/s.
        omega_p: f64,
    },
    /// First-order RL plant (no capacitor) under proportional feedback.
    Rlp { k_p: f64 },
}

impl ControlScheme {
    pub fn name(&self) -> &'static str {
        match self {
            ControlScheme::Cmc => "cmc",
            ControlScheme::Pvmc { .. } => "pvmc",
            ControlScheme::Cfpvr { .. } => "cfpvr",
            ControlScheme::Acmc { .. } => "acmc",
            ControlScheme::Vmc3 { .. } => "vmc3",
            ControlScheme::Rlp { .. } => "rlp",
        }
    }

    /// Whether the power stage includes the output capacitor.
    pub fn needs_capacitor(&self) -> bool {
        !matches!(self, ControlScheme::Rlp { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64, name: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive, got {x}")))
            }
        };
        match *self {
            ControlScheme::Cmc => Ok(()),
            ControlScheme::Pvmc { k_p } | ControlScheme::Cfpvr { k_p } | ControlScheme::Rlp { k_p } => {
                positive(k_p, "k_p")
            }
            ControlScheme::Acmc { r_s, k_c, z_c, omega_p } => {
                positive(r_s, "R_s")?;
                positive(k_c, "K_c")?;
                positive(z_c, "z_c")?;
                positive(omega_p, "omega_p")
            }
            ControlScheme::Vmc3 { k_c, kappa_z, omega_p } => {
                positive(k_c, "K_c")?;
                positive(omega_p, "omega_p")?;
                if kappa_z > 0.0 && kappa_z <= 2.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("kappa_z must lie in (0, 2], got {kappa_z}")))
                }
            }
        }
    }

    /// Parameter combinations outside the validity range of the closed forms.
    pub fn warnings(&self, params: &BuckParams) -> Vec<String> {
        let mut out = Vec::new();
        if let ControlScheme::Acmc { z_c, .. } = *self {
            if z_c >= params.omega_s() / 2.0 {
                out.push(format!(
                    "z_c = {z_c} rad/s is not well below omega_s; the high-frequency loop gain is a poor fit"
                ));
            }
        }
        if self.needs_capacitor() && params.c.is_none() {
            out.push("scheme needs the output capacitance C".to_string());
        }
        out
    }

    /// Normalized compensator pole `p = ω_p / ω_s`, where the scheme has one.
    pub fn pole_ratio(&self, params: &BuckParams) -> Option<f64> {
        match *self {
            ControlScheme::Acmc { omega_p, .. } | ControlScheme::Vmc3 { omega_p, .. } => {
                Some(omega_p / params.omega_s())
            }
            _ => None,
        }
    }
}

impl fmt::Display for ControlScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a closed-form stability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalResult {
    /// `𝓛 = F[T]`.
    pub lvalue: f64,
    /// Critical value of the parameter being solved for, if any.
    pub critical: Option<f64>,
    /// `𝓛 < 1`.
    pub stable: bool,
}

impl CriticalResult {
    pub fn from_lvalue(lvalue: f64) -> Self {
        CriticalResult {
            lvalue,
            critical: None,
            stable: lvalue < 1.0,
        }
    }

    pub fn with_critical(mut self, value: f64) -> Self {
        self.critical = Some(value);
        self
    }
}
