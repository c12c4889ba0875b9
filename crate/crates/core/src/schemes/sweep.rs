use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::BuckParams;
use crate::roots::{bisect, grid, scan_roots};
use crate::transform::pole_integrator_kernel;
use crate::units::{DutyCycle, NormalizedFreq};

use super::critical::{harmonic_balance, nominal_duty, rlp_critical_gain};
use super::ControlScheme;

/// Relative bracket width at which crossings are reported.
pub const CROSSING_TOLERANCE: f64 = 1e-9;

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Duty cycle `D`.
    Duty,
    /// Compensator pole `p = ω_p/ω_s`.
    PoleRatio,
    /// Source voltage `v_s`.
    SourceVoltage,
    /// `k_p`, or `K_c` for the dynamic compensators.
    Gain,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Duty => "D",
            SweepVariable::PoleRatio => "p",
            SweepVariable::SourceVoltage => "v_s",
            SweepVariable::Gain => "k_p",
        }
    }

    /// Current value of the variable, or `None` where it is not a fixed input.
    pub fn current(&self, params: &BuckParams, scheme: &ControlScheme) -> Option<f64> {
        match (*self, *scheme) {
            (SweepVariable::Duty, _) => None,
            (SweepVariable::SourceVoltage, _) => Some(params.v_s),
            (SweepVariable::PoleRatio, s) => s.pole_ratio(params),
            (SweepVariable::Gain, ControlScheme::Cmc) => None,
            (
                SweepVariable::Gain,
                ControlScheme::Pvmc { k_p } | ControlScheme::Cfpvr { k_p } | ControlScheme::Rlp { k_p },
            ) => Some(k_p),
            (SweepVariable::Gain, ControlScheme::Acmc { k_c, .. } | ControlScheme::Vmc3 { k_c, .. }) => {
                Some(k_c)
            }
        }
    }

    /// Copy of the operating point with the variable set to `value`.
    ///
    /// Duty is not stored in either struct; it comes back as an override.
    pub fn apply(
        &self,
        params: &BuckParams,
        scheme: &ControlScheme,
        value: f64,
    ) -> Result<(BuckParams, ControlScheme, Option<DutyCycle>)> {
        let mut p = params.clone();
        let mut s = *scheme;
        let mut duty = None;
        match *self {
            SweepVariable::Duty => duty = Some(DutyCycle::new(value)?),
            SweepVariable::SourceVoltage => {
                if value.is_nan() || value <= 0.0 {
                    return Err(Error::invalid("v_s must be positive"));
                }
                p.v_s = value
            }
            SweepVariable::PoleRatio => {
                let w = NormalizedFreq::new(value)?.get() * params.omega_s();
                match &mut s {
                    ControlScheme::Acmc { omega_p, .. } | ControlScheme::Vmc3 { omega_p, .. } => *omega_p = w,
                    _ => return Err(Error::invalid(format!("scheme {scheme} has no compensator pole"))),
                }
            }
            SweepVariable::Gain => match &mut s {
                ControlScheme::Pvmc { k_p } | ControlScheme::Cfpvr { k_p } | ControlScheme::Rlp { k_p } => {
                    *k_p = value
                }
                ControlScheme::Acmc { k_c, .. } | ControlScheme::Vmc3 { k_c, .. } => *k_c = value,
                ControlScheme::Cmc => return Err(Error::invalid("cmc has no loop gain parameter")),
            },
        }
        Ok((p, s, duty))
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" | "duty" => Ok(SweepVariable::Duty),
            "p" | "omega_p" => Ok(SweepVariable::PoleRatio),
            "v_s" | "vs" => Ok(SweepVariable::SourceVoltage),
            "k_p" | "kp" | "k_c" | "kc" => Ok(SweepVariable::Gain),
            other => Err(Error::invalid(format!("unknown sweep variable `{other}`"))),
        }
    }
}

/// A variable and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
}

impl Sweep {
    pub fn new(variable: SweepVariable, grid: Vec<f64>) -> Self {
        Sweep { variable, grid }
    }

    pub fn linear(variable: SweepVariable, start: f64, stop: f64, n: usize) -> Result<Self> {
        Ok(Sweep::new(variable, grid(start, stop, n, false)?))
    }

    pub fn log(variable: SweepVariable, start: f64, stop: f64, n: usize) -> Result<Self> {
        Ok(Sweep::new(variable, grid(start, stop, n, true)?))
    }
}

pub(crate) fn check_monotone(values: &[f64]) -> Result<()> {
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("grid values must be finite"));
    }
    let inc = values.windows(2).all(|w| w[1] > w[0]);
    let dec = values.windows(2).all(|w| w[1] < w[0]);
    if inc || dec {
        Ok(())
    } else {
        Err(Error::invalid("grid must be strictly monotone"))
    }
}

/// How the duty cycle is chosen at each evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DutySpec {
    Fixed(DutyCycle),
    /// Steady-state duty of the operating point (see [`nominal_duty`]).
    Nominal,
}

impl DutySpec {
    pub fn resolve(&self, params: &BuckParams, scheme: &ControlScheme) -> Result<DutyCycle> {
        match *self {
            DutySpec::Fixed(d) => Ok(d),
            DutySpec::Nominal => nominal_duty(params, scheme),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    duty: f64,
    hb: f64,
    v_m: f64,
}

fn evaluate(
    params: &BuckParams,
    scheme: &ControlScheme,
    duty: DutySpec,
    variable: SweepVariable,
    value: f64,
) -> Result<Point> {
    let (p, s, over) = variable.apply(params, scheme, value)?;
    let d = match over {
        Some(d) => d,
        None => duty.resolve(&p, &s)?,
    };
    Ok(Point {
        duty: d.get(),
        hb: harmonic_balance(&p, &s, d)?,
        v_m: p.ramp_amplitude(),
    })
}

/// `𝓛` along a sweep with its crossings of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LPlotCurve {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    /// Duty used at each grid point.
    pub duty: Vec<f64>,
    pub lvalue: Vec<f64>,
    /// Parameter values where `𝓛 = 1`, in grid order.
    pub crossings: Vec<f64>,
}

impl LPlotCurve {
    /// Grid point with the largest `𝓛`.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.lvalue)
            .filter(|(_, l)| !l.is_nan())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(&x, &l)| (x, l))
    }
}

/// Closed-form `𝓛` on a grid of one variable.
pub fn lplot(params: &BuckParams, scheme: &ControlScheme, duty: DutySpec, sweep: &Sweep) -> Result<LPlotCurve> {
    if sweep.grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    check_monotone(&sweep.grid)?;
    let var = sweep.variable;
    let points: Vec<Point> = sweep
        .grid
        .par_iter()
        .map(|&x| evaluate(params, scheme, duty, var, x))
        .collect::<Result<_>>()?;
    let f = |x: f64| evaluate(params, scheme, duty, var, x).map(|pt| pt.hb - pt.v_m);

    let mut crossings = Vec::new();
    for i in 0..points.len() {
        let r0 = points[i].hb - points[i].v_m;
        if r0 == 0.0 {
            crossings.push(sweep.grid[i]);
            continue;
        }
        if let Some(next) = points.get(i + 1) {
            let r1 = next.hb - next.v_m;
            if r1 != 0.0 && r0.signum() != r1.signum() {
                crossings.push(bisect(f, sweep.grid[i], sweep.grid[i + 1], CROSSING_TOLERANCE, 0.0)?);
            }
        }
    }
    Ok(LPlotCurve {
        variable: var,
        grid: sweep.grid.clone(),
        duty: points.iter().map(|p| p.duty).collect(),
        lvalue: points.iter().map(|p| p.hb / p.v_m).collect(),
        crossings,
    })
}

/// `α₀(D) − α(D, p)` with rows along `d_grid` and columns along `p_grid`.
pub fn contour_data(d_grid: &[f64], p_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_monotone(d_grid)?;
    check_monotone(p_grid)?;
    let ds = d_grid.iter().map(|&d| DutyCycle::new(d)).collect::<Result<Vec<_>>>()?;
    let ps = p_grid.iter().map(|&p| NormalizedFreq::new(p)).collect::<Result<Vec<_>>>()?;
    Ok(ds
        .par_iter()
        .map(|&d| ps.iter().map(|&p| pole_integrator_kernel(d, p)).collect())
        .collect())
}

/// Parameter solved for by [`solve_critical`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveFor {
    SourceVoltage,
    Gain,
    /// Ramp slope `m_a = V_m/T`, at the current duty.
    RampSlope,
    Duty,
}

impl FromStr for SolveFor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v_s" | "vs" => Ok(SolveFor::SourceVoltage),
            "k_p" | "kp" | "k_c" | "kc" => Ok(SolveFor::Gain),
            "m_a" | "ma" => Ok(SolveFor::RampSlope),
            "D" | "d" | "duty" => Ok(SolveFor::Duty),
            other => Err(Error::invalid(format!("cannot solve for `{other}`"))),
        }
    }
}

impl fmt::Display for SolveFor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveFor::SourceVoltage => "v_s",
            SolveFor::Gain => "k_p",
            SolveFor::RampSlope => "m_a",
            SolveFor::Duty => "D",
        })
    }
}

/// Values of `target` at which `𝓛 = 1`, everything else held.
///
/// With a fixed duty `𝓛` is linear in `v_s` and in the gain, so those are
/// solved directly. With the nominal duty the duty moves with the target and
/// the roots are bracketed on a log grid over three decades either side.
pub fn solve_critical(
    params: &BuckParams,
    scheme: &ControlScheme,
    duty: DutySpec,
    target: SolveFor,
) -> Result<Vec<f64>> {
    match target {
        SolveFor::Duty => {
            let ds = grid(0.0, 1.0, 2001, false)?;
            let f = |d: f64| harmonic_balance(params, scheme, DutyCycle::new(d)?).map(|h| h - params.ramp_amplitude());
            let roots = scan_roots(f, &ds, CROSSING_TOLERANCE)?;
            if roots.is_empty() {
                return Err(Error::NoRoot("L = 1 is not reached for any duty".into()));
            }
            Ok(roots)
        }
        SolveFor::RampSlope => {
            let d = duty.resolve(params, scheme)?;
            Ok(vec![harmonic_balance(params, scheme, d)? / params.period()])
        }
        SolveFor::SourceVoltage | SolveFor::Gain => {
            let var = if target == SolveFor::Gain {
                SweepVariable::Gain
            } else {
                SweepVariable::SourceVoltage
            };
            let current = var
                .current(params, scheme)
                .ok_or_else(|| Error::invalid(format!("scheme {scheme} has no {target} to solve for")))?;
            match duty {
                DutySpec::Fixed(d) => {
                    let hb = harmonic_balance(params, scheme, d)?;
                    if hb > 0.0 {
                        Ok(vec![current * params.ramp_amplitude() / hb])
                    } else {
                        Err(Error::domain(format!("L = {hb:e}/V_m is not positive; no critical {target}")))
                    }
                }
                DutySpec::Nominal => {
                    if let (ControlScheme::Rlp { .. }, SolveFor::Gain) = (scheme, target) {
                        return Ok(vec![rlp_critical_gain(params)?.k_p]);
                    }
                    let xs = grid(current * 1e-3, current * 1e3, 1201, true)?;
                    let f = |x: f64| evaluate(params, scheme, duty, var, x).map(|pt| pt.hb - pt.v_m);
                    let roots = scan_roots(f, &xs, CROSSING_TOLERANCE)?;
                    if roots.is_empty() {
                        return Err(Error::NoRoot(format!("no critical {target} within three decades")));
                    }
                    Ok(roots)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmc() -> BuckParams {
        BuckParams {
            v_s: 12.0,
            v_r: 2.0,
            v_l: 0.0,
            v_h: 0.0,
            f_s: 100e3,
            l: 10e-6,
            c: Some(100e-6),
            r: 1.0,
            r_c: 0.01,
        }
    }

    #[test]
    fn cmc_duty_crossing() {
        let sweep = Sweep::linear(SweepVariable::Duty, 0.05, 0.95, 37).unwrap();
        let curve = lplot(&cmc(), &ControlScheme::Cmc, DutySpec::Nominal, &sweep).unwrap();
        assert_eq!(curve.crossings.len(), 1);
        assert!((curve.crossings[0] - 0.5).abs() < 1e-6);
        let roots = solve_critical(&cmc(), &ControlScheme::Cmc, DutySpec::Nominal, SolveFor::Duty).unwrap();
        assert_eq!(roots, vec![0.5]);
    }

    #[test]
    fn single_point_and_bad_grids() {
        let s = ControlScheme::Cmc;
        let one = Sweep::new(SweepVariable::Duty, vec![0.3]);
        let c = lplot(&cmc(), &s, DutySpec::Nominal, &one).unwrap();
        assert!(c.crossings.is_empty());
        let empty = Sweep::new(SweepVariable::Duty, vec![]);
        assert!(lplot(&cmc(), &s, DutySpec::Nominal, &empty).is_err());
        let bumpy = Sweep::new(SweepVariable::Duty, vec![0.1, 0.3, 0.2]);
        assert!(lplot(&cmc(), &s, DutySpec::Nominal, &bumpy).is_err());
    }

    #[test]
    fn contour_peak() {
        let ds = grid(0.0, 1.0, 41, false).unwrap();
        let ps = grid(0.0, 2.0, 41, false).unwrap();
        let z = contour_data(&ds, &ps).unwrap();
        let max = z.iter().flatten().cloned().fold(f64::MIN, f64::max);
        assert!(max <= std::f64::consts::PI + 1e-9);
        assert!(z.iter().all(|row| row[0] == 0.0));
        let v = contour_data(&[0.7], &[0.4]).unwrap()[0][0];
        assert!((v - 1.5).abs() < 0.1, "{v}");
    }

    #[test]
    fn parse_names() {
        assert_eq!("p".parse::<SweepVariable>().unwrap(), SweepVariable::PoleRatio);
        assert_eq!("m_a".parse::<SolveFor>().unwrap(), SolveFor::RampSlope);
        assert!("x".parse::<SweepVariable>().is_err());
    }
}
