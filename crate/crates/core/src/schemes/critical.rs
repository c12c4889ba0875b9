use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::BuckParams;
use crate::roots::{bisect, grid};
use crate::transform::{alpha, alpha0, alpha1, pole_integrator_kernel};
use crate::units::{DutyCycle, NormalizedFreq};

use super::{ControlScheme, CriticalResult};

fn ratio(p: f64) -> Result<NormalizedFreq> {
    NormalizedFreq::new(p)
}

fn positive_kernel(d: DutyCycle, p: f64) -> Result<f64> {
    let k = pole_integrator_kernel(d, ratio(p)?);
    if k > 0.0 {
        Ok(k)
    } else {
        Err(Error::domain(format!(
            "alpha0 - alpha = {k} at D = {d}, p = {p}; no finite positive critical value"
        )))
    }
}

/// `F[v_s G(s)]` in volts, i.e. `V_m · 𝓛`. Finite even when `V_m = 0`.
pub fn harmonic_balance(params: &BuckParams, scheme: &ControlScheme, d: DutyCycle) -> Result<f64> {
    let ws = params.omega_s();
    let v_s = params.v_s;
    let dd = d.get();
    Ok(match *scheme {
        ControlScheme::Cmc => v_s * alpha0(d) / (params.l * ws),
        ControlScheme::Pvmc { k_p } | ControlScheme::Cfpvr { k_p } => {
            let c = params.capacitance()?;
            if params.r_c > 0.0 {
                pvmc_bracket(params, c, k_p, dd)
            } else {
                let p = 1.0 / (params.r * c * ws);
                v_s * k_p * params.r * pole_integrator_kernel(d, ratio(p)?) / (params.l * ws)
            }
        }
        ControlScheme::Rlp { k_p } => {
            let p = params.r / (params.l * ws);
            v_s * k_p * p * alpha(d, ratio(p)?)
        }
        ControlScheme::Acmc { r_s, k_c, z_c, omega_p } => {
            v_s * r_s * k_c * pole_integrator_kernel(d, ratio(omega_p / ws)?) / (z_c * params.l * ws)
        }
        ControlScheme::Vmc3 { k_c, kappa_z, omega_p } => {
            v_s * k_c * params.rho() * pole_integrator_kernel(d, ratio(omega_p / ws)?) / (kappa_z * ws)
        }
    })
}

// v_s k_p ρ T²/(4LC) [(2R_cC/T)(2D−1) + (2D²−2D+1)]
fn pvmc_bracket(params: &BuckParams, c: f64, k_p: f64, d: f64) -> f64 {
    let t = params.period();
    let bracket = 2.0 * params.r_c * c / t * (2.0 * d - 1.0) + (2.0 * d * d - 2.0 * d + 1.0);
    params.v_s * k_p * params.rho() * t * t / (4.0 * params.l * c) * bracket
}

/// The scheme's closed-form `𝓛` at duty `d`.
pub fn lvalue(params: &BuckParams, scheme: &ControlScheme, d: DutyCycle) -> Result<f64> {
    Ok(harmonic_balance(params, scheme, d)? / params.ramp_amplitude())
}

/// `V_m(𝓛 − 1)`; its zeros are the critical points. Defined at `V_m = 0`.
pub fn residual(params: &BuckParams, scheme: &ControlScheme, d: DutyCycle) -> Result<f64> {
    Ok(harmonic_balance(params, scheme, d)? - params.ramp_amplitude())
}

/// Steady-state duty `D = v_o / v_s` of the averaged loop; exact periodic
/// solution for the RL plant.
pub fn nominal_duty(params: &BuckParams, scheme: &ControlScheme) -> Result<DutyCycle> {
    let (v_s, v_r, v_l, v_m) = (params.v_s, params.v_r, params.v_l, params.ramp_amplitude());
    let d = match *scheme {
        ControlScheme::Cmc => (v_r - v_l) / (v_s / params.r + v_m),
        ControlScheme::Pvmc { k_p } => (k_p * v_r - v_l) / (k_p * v_s + v_m),
        ControlScheme::Cfpvr { k_p } => (v_r - v_l) / (k_p * v_s + v_m),
        ControlScheme::Acmc { r_s, .. } => params.r * v_r / (r_s * v_s),
        ControlScheme::Vmc3 { .. } => v_r / v_s,
        ControlScheme::Rlp { k_p } => return rlp_steady_duty(params, k_p),
    };
    if (0.0..=1.0).contains(&d) {
        DutyCycle::new(d)
    } else {
        Err(Error::domain(format!("steady-state duty {d} lies outside [0, 1]")))
    }
}

/// Critical ramp slope `(v_s/L)(D − ½)` for peak current mode.
pub fn critical_cmc(params: &BuckParams, d: DutyCycle) -> f64 {
    params.v_s / params.l * (d.get() - 0.5)
}

/// Proportional voltage mode with ESR zero; `critical` is the critical `k_p`.
pub fn critical_pvmc(params: &BuckParams, k_p: f64, d: DutyCycle) -> Result<CriticalResult> {
    let c = params.capacitance()?;
    let lv = pvmc_bracket(params, c, k_p, d.get()) / params.ramp_amplitude();
    Ok(with_gain(lv, k_p))
}

fn with_gain(lv: f64, k_p: f64) -> CriticalResult {
    let r = CriticalResult::from_lvalue(lv);
    if lv > 0.0 && lv.is_finite() {
        r.with_critical(k_p / lv)
    } else {
        r
    }
}

/// Proportional voltage mode without ESR.
pub fn critical_pvmc_noesr(params: &BuckParams, k_p: f64, d: DutyCycle) -> Result<CriticalResult> {
    if params.r_c != 0.0 {
        return Err(Error::invalid("critical_pvmc_noesr requires R_c = 0"));
    }
    critical_pvmc(params, k_p, d)
}

/// Minimum stabilizing ramp slope for PVMC and V² control with ESR.
pub fn v2_min_ramp(params: &BuckParams, k_p: f64, d: DutyCycle) -> Result<f64> {
    let c = params.capacitance()?;
    let dd = d.get();
    if params.r_c <= 0.0 {
        return Err(Error::domain("the ramp bound needs R_c > 0"));
    }
    if dd <= 0.0 {
        return Err(Error::domain("the ramp bound is undefined at D = 0"));
    }
    let t = params.period();
    let v_o = dd * params.v_s;
    let rhs = (2.0 * dd - 1.0) / (2.0 * dd)
        + t / (params.r_c * c) * ((1.0 - 2.0 * dd) / (4.0 * dd) + dd / 2.0);
    Ok(rhs * k_p * params.rho() * v_o * params.r_c / params.l)
}

/// Large-capacitance limit of [`v2_min_ramp`]: `k_p ρ (2D − 1) v_s R_c / 2L`.
pub fn v2_min_ramp_large_c(params: &BuckParams, k_p: f64, d: DutyCycle) -> f64 {
    k_p * params.rho() * (2.0 * d.get() - 1.0) * params.v_s * params.r_c / (2.0 * params.l)
}

/// Ramp-free stability in the period form: `T/(R_c C) < 1 / (½ + D²/(1−2D))`.
pub fn no_ramp_feasible(rc_over_t: f64, d: DutyCycle) -> bool {
    let dd = d.get();
    let bound = 1.0 / (0.5 + dd * dd / (1.0 - 2.0 * dd));
    1.0 / rc_over_t < bound
}

/// Ramp-free stability in the ESR form: `R_c C/T > ½ + D²/(1−2D)` and `D < ½`.
pub fn no_ramp_feasible_esr(rc_over_t: f64, d: DutyCycle) -> bool {
    no_ramp_esr_boundary(d).is_some_and(|b| rc_over_t > b)
}

/// Smallest `R_c C / T` that is stable without a ramp, if any.
pub fn no_ramp_esr_boundary(d: DutyCycle) -> Option<f64> {
    let dd = d.get();
    (dd < 0.5).then(|| 0.5 + dd * dd / (1.0 - 2.0 * dd))
}

/// Critical source voltage of PVMC without ESR, keeping the load pole.
pub fn critical_pvmc_small_r(params: &BuckParams, k_p: f64, d: DutyCycle) -> Result<f64> {
    if params.r_c != 0.0 {
        return Err(Error::invalid("critical_pvmc_small_r requires R_c = 0"));
    }
    let c = params.capacitance()?;
    let ws = params.omega_s();
    let k = positive_kernel(d, 1.0 / (params.r * c * ws))?;
    Ok(params.l * params.ramp_amplitude() * ws / (params.r * k_p * k))
}

/// RL plant under proportional feedback; `critical` is the critical `k_p` at this duty.
pub fn critical_rlp(params: &BuckParams, k_p: f64, d: DutyCycle) -> Result<CriticalResult> {
    let lv = lvalue(params, &ControlScheme::Rlp { k_p }, d)?;
    Ok(with_gain(lv, k_p))
}

// Peak current of the periodic RL solution at duty d.
fn rl_peak_current(params: &BuckParams, d: f64) -> f64 {
    let tau_inv = params.r / params.l * params.period();
    let a = (-d * tau_inv).exp();
    let ab = (-tau_inv).exp();
    params.v_s / params.r * (1.0 - a) / (1.0 - ab)
}

/// Duty of the exact periodic solution of the RL plant: the switching
/// instant solves `k_p(v_r − R i_pk(D)) = h(DT)`.
pub fn rlp_steady_duty(params: &BuckParams, k_p: f64) -> Result<DutyCycle> {
    let g = |d: f64| -> Result<f64> {
        Ok(k_p * (params.v_r - params.r * rl_peak_current(params, d))
            - (params.v_l + params.ramp_amplitude() * d))
    };
    if g(0.0)? < 0.0 {
        return DutyCycle::new(0.0);
    }
    if g(1.0)? > 0.0 {
        return DutyCycle::new(1.0);
    }
    DutyCycle::new(bisect(g, 0.0, 1.0, 0.0, 1e-15)?)
}

/// Joint solution of the RL critical condition and the steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlpCritical {
    pub k_p: f64,
    pub duty: DutyCycle,
}

/// Bracket searched for the critical RL gain.
pub const RLP_GAIN_RANGE: (f64, f64) = (0.1, 100.0);

/// Critical `k_p` of the RL plant with the duty following the steady state.
pub fn rlp_critical_gain(params: &BuckParams) -> Result<RlpCritical> {
    let f = |k: f64| -> Result<f64> {
        let d = rlp_steady_duty(params, k)?;
        residual(params, &ControlScheme::Rlp { k_p: k }, d)
    };
    let ks = grid(RLP_GAIN_RANGE.0, RLP_GAIN_RANGE.1, 400, true)?;
    let mut prev: Option<(f64, f64)> = None;
    for &k in &ks {
        let v = f(k)?;
        if let Some((k0, v0)) = prev {
            if v0 < 0.0 && v >= 0.0 {
                let k_p = bisect(f, k0, k, 1e-13, 0.0)?;
                return Ok(RlpCritical {
                    k_p,
                    duty: rlp_steady_duty(params, k_p)?,
                });
            }
        }
        prev = Some((k, v));
    }
    Err(Error::NoRoot(format!(
        "no critical gain in [{}, {}]",
        RLP_GAIN_RANGE.0, RLP_GAIN_RANGE.1
    )))
}

/// Gain `K` of the loop gains of the form `K ω_s / (s(1 + s/ω_p))`, so that
/// `𝓛 = K (α₀(D) − α(D, p))`.
///
/// ACMC: `K = v_s R_s K_c / (V_m z_c L ω_s)`; type-III VMC: `K = v_s K_c ρ / (V_m κ_z ω_s)`.
pub fn combined_gain(params: &BuckParams, scheme: &ControlScheme) -> Result<f64> {
    let base = params.v_s / (params.ramp_amplitude() * params.omega_s());
    match *scheme {
        ControlScheme::Acmc { r_s, k_c, z_c, .. } => Ok(base * r_s * k_c / (z_c * params.l)),
        ControlScheme::Vmc3 { k_c, kappa_z, .. } => Ok(base * k_c * params.rho() / kappa_z),
        _ => Err(Error::invalid(format!("scheme {scheme} has no single-pole integrator loop gain"))),
    }
}

/// Closed-form ACMC stability at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcmcCritical {
    /// `critical` holds the critical source voltage when one exists.
    pub result: CriticalResult,
    /// Combined gain `K`.
    pub gain: f64,
    /// Minimum stabilizing ramp slope, V/s.
    pub min_ramp_slope: f64,
}

pub fn critical_acmc(params: &BuckParams, scheme: &ControlScheme, d: DutyCycle) -> Result<AcmcCritical> {
    let ControlScheme::Acmc { r_s, k_c, z_c, omega_p } = *scheme else {
        return Err(Error::invalid("critical_acmc needs an ACMC scheme"));
    };
    let ws = params.omega_s();
    let kern = pole_integrator_kernel(d, ratio(omega_p / ws)?);
    let hb = harmonic_balance(params, scheme, d)?;
    let mut result = CriticalResult::from_lvalue(hb / params.ramp_amplitude());
    if kern > 0.0 {
        result = result.with_critical(params.ramp_amplitude() * z_c * params.l * ws / (r_s * k_c * kern));
    }
    Ok(AcmcCritical {
        result,
        gain: combined_gain(params, scheme)?,
        min_ramp_slope: params.v_s * r_s * k_c * kern / (2.0 * PI * z_c * params.l),
    })
}

/// Interval of `p` (possibly empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PWindow {
    pub low: f64,
    pub high: f64,
}

impl PWindow {
    pub fn is_empty(&self) -> bool {
        self.low.is_nan() || self.high.is_nan() || self.low >= self.high
    }
}

/// Small/large-`p` estimate of the ACMC instability window for combined gain `k`.
pub fn acmc_window_estimate(k: f64, d: DutyCycle) -> PWindow {
    let dd = d.get();
    let e = (-PI * dd).exp();
    PWindow {
        low: 1.0 / (k * alpha1(d)),
        high: 0.5 + (2.0 * dd - 1.0 + 2.0 * e - 1.0 / (k * PI)) / (4.0 * PI * dd * e),
    }
}

/// Critical source voltage of VMC with the type-III compensator.
pub fn critical_vmc3(params: &BuckParams, scheme: &ControlScheme, d: DutyCycle) -> Result<f64> {
    let ControlScheme::Vmc3 { k_c, kappa_z, omega_p } = *scheme else {
        return Err(Error::invalid("critical_vmc3 needs a VMC3 scheme"));
    };
    let ws = params.omega_s();
    let k = positive_kernel(d, omega_p / ws)?;
    Ok(params.ramp_amplitude() * kappa_z * ws / (k_c * params.rho() * k))
}
