//! Sampled-data analysis: eigenvalues of the cycle map at the period-1 orbit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::BuckParams;
use crate::roots::bisect;
use crate::schemes::{check_monotone, ControlScheme, SweepVariable};
use crate::sim::{build_closed_loop, cycle_jacobian, steady_state, Stepper, SteadyState, JACOBIAN_STEP};

/// Relative tolerance of the −1-crossing bisection.
pub const CROSSING_TOLERANCE: f64 = 1e-6;

/// Jacobian of the cycle map at a period-1 orbit with interior duty.
pub fn poincare_jacobian(stepper: &Stepper, orbit: &SteadyState) -> Result<DMatrix<f64>> {
    poincare_jacobian_with_step(stepper, orbit, JACOBIAN_STEP)
}

/// As [`poincare_jacobian`] with a custom relative step.
pub fn poincare_jacobian_with_step(stepper: &Stepper, orbit: &SteadyState, step: f64) -> Result<DMatrix<f64>> {
    if orbit.duty <= 0.0 || orbit.duty >= 1.0 {
        return Err(Error::DegenerateOrbit { duty: orbit.duty });
    }
    cycle_jacobian(stepper, &orbit.x, step)
}

/// Cycle-map eigenvalues ("sampled-data poles").
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    /// Duty of the orbit the poles belong to.
    pub duty: f64,
}

impl PoleSet {
    pub fn from_jacobian(j: &DMatrix<f64>, duty: f64) -> Self {
        let mut eigenvalues: Vec<Complex64> = j.complex_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        PoleSet {
            eigenvalues,
            spectral_radius,
            duty,
        }
    }

    /// Smallest real part; `−1` marks period doubling.
    pub fn min_real(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0
    }
}

/// Poles of the closed loop at its period-1 orbit.
pub fn poles(params: &BuckParams, scheme: &ControlScheme) -> Result<PoleSet> {
    let stepper = Stepper::new(build_closed_loop(params, scheme)?);
    let orbit = steady_state(&stepper)?;
    let j = poincare_jacobian(&stepper, &orbit)?;
    Ok(PoleSet::from_jacobian(&j, orbit.duty))
}

/// Direction of an eigenvalue passing through −1 as the parameter increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    /// Leaves the unit disk.
    Exit,
    /// Re-enters the unit disk.
    Enter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleCrossing {
    pub value: f64,
    pub eigenvalue: Complex64,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolePoint {
    pub value: f64,
    /// Poles, or the error message of a failed point.
    pub poles: std::result::Result<PoleSet, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleTrajectory {
    pub variable: SweepVariable,
    pub points: Vec<PolePoint>,
    pub crossings: Vec<PoleCrossing>,
    /// Brackets whose refinement failed, with the reason.
    pub failed_crossings: Vec<(f64, f64, String)>,
}

fn poles_at(params: &BuckParams, scheme: &ControlScheme, var: SweepVariable, value: f64) -> Result<PoleSet> {
    let (p, s, duty) = var.apply(params, scheme, value)?;
    if duty.is_some() {
        return Err(Error::invalid("duty is an outcome of the simulated loop, not a sweep input"));
    }
    poles(&p, &s)
}

// Reorder `next` so each entry is the nearest still-unassigned eigenvalue
// to the corresponding entry of `prev`.
fn match_eigenvalues(prev: &[Complex64], next: &mut Vec<Complex64>) {
    if prev.len() != next.len() {
        return;
    }
    let mut pool = std::mem::take(next);
    for p in prev {
        let (k, _) = pool
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - p).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pool matches prev in length");
        next.push(pool.swap_remove(k));
    }
}

/// Poles along a parameter sweep with their −1 crossings.
pub fn pole_trajectory(
    params: &BuckParams,
    scheme: &ControlScheme,
    variable: SweepVariable,
    grid: &[f64],
) -> Result<PoleTrajectory> {
    check_monotone(grid)?;
    let mut points: Vec<PolePoint> = grid
        .par_iter()
        .map(|&value| PolePoint {
            value,
            poles: poles_at(params, scheme, variable, value).map_err(|e| e.to_string()),
        })
        .collect();

    for i in 1..points.len() {
        let (head, tail) = points.split_at_mut(i);
        if let (Ok(prev), Ok(cur)) = (&head[i - 1].poles, &mut tail[0].poles) {
            match_eigenvalues(&prev.eigenvalues, &mut cur.eigenvalues);
        }
    }

    let f = |x: f64| poles_at(params, scheme, variable, x).map(|ps| ps.min_real() + 1.0);
    let mut crossings = Vec::new();
    let mut failed_crossings = Vec::new();
    for w in points.windows(2) {
        let (Ok(a), Ok(b)) = (&w[0].poles, &w[1].poles) else {
            continue;
        };
        let (fa, fb) = (a.min_real() + 1.0, b.min_real() + 1.0);
        if fa.signum() == fb.signum() {
            continue;
        }
        match bisect(f, w[0].value, w[1].value, CROSSING_TOLERANCE, 0.0) {
            Ok(value) => {
                let eigenvalue = poles_at(params, scheme, variable, value)
                    .ok()
                    .and_then(|ps| ps.eigenvalues.iter().copied().min_by(|x, y| x.re.total_cmp(&y.re)))
                    .unwrap_or(Complex64::new(-1.0, 0.0));
                let increasing = w[1].value > w[0].value;
                let exits = (fa > 0.0) == increasing;
                crossings.push(PoleCrossing {
                    value,
                    eigenvalue,
                    direction: if exits { CrossingDirection::Exit } else { CrossingDirection::Enter },
                });
            }
            Err(e) => failed_crossings.push((w[0].value, w[1].value, e.to_string())),
        }
    }
    Ok(PoleTrajectory {
        variable,
        points,
        crossings,
        failed_crossings,
    })
}
