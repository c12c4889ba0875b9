use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::params::BuckParams;

use super::model::{ClosedLoop, StateVector};
use super::step::Stepper;
use super::trace::{simulate, InitialState, SimOptions};

/// Relative perturbation of the finite-difference cycle Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;

const NEWTON_MAX_ITER: usize = 60;

/// Averaged DC operating point: state and duty solving `0 = A x + D b_on + (1−D) b_off`
/// together with `y = h(DT)`.
pub fn averaged_operating_point(sys: &ClosedLoop) -> Result<(StateVector, f64)> {
    let n = sys.dim();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&sys.a);
    m.view_mut((0, n), (n, 1)).copy_from(&(&sys.b_on - &sys.b_off));
    m.view_mut((n, 0), (1, n)).copy_from(&sys.c_y.transpose());
    m[(n, n)] = -sys.v_m;
    let mut rhs = DVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from(&(-&sys.b_off));
    rhs[n] = sys.v_l - sys.d_y;
    let z = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalFailure("averaged model is singular".into()))?;
    Ok((z.rows(0, n).into_owned(), z[n]))
}

/// Central-difference Jacobian of the cycle map at `x` with steps `scale·(1 + |x_i|)`.
pub fn cycle_jacobian(stepper: &Stepper, x: &StateVector, scale: f64) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let h = scale * (1.0 + x[i].abs());
        let mut xp = x.clone();
        xp[i] += h;
        let mut xm = x.clone();
        xm[i] -= h;
        let col = (stepper.step(&xp)?.0 - stepper.step(&xm)?.0) / (2.0 * h);
        j.set_column(i, &col);
    }
    Ok(j)
}

/// Period-1 orbit: cycle-start state and duty.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub x: StateVector,
    pub duty: f64,
}

fn newton(stepper: &Stepper, mut x: StateVector) -> Result<StateVector> {
    let n = x.len();
    let resid = |x: &StateVector| -> Result<StateVector> { Ok(stepper.step(x)?.0 - x) };
    let mut r = resid(&x)?;
    for _ in 0..NEWTON_MAX_ITER {
        let scale = 1.0 + x.norm();
        if r.norm() <= 1e-13 * scale {
            return Ok(x);
        }
        let j = cycle_jacobian(stepper, &x, JACOBIAN_STEP)? - DMatrix::identity(n, n);
        let dx = j
            .lu()
            .solve(&(-&r))
            .ok_or_else(|| Error::NoConvergence("singular Newton matrix".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial = &x + &dx * lambda;
            if let Ok(rt) = resid(&trial) {
                if rt.norm() < r.norm() {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // Cannot decrease the residual further; accept if already tight.
            if r.norm() <= 1e-9 * scale {
                return Ok(x);
            }
            return Err(Error::NoConvergence(format!("line search stalled at residual {:e}", r.norm())));
        }
        if (&dx * lambda).norm() <= 1e-14 * (1.0 + x.norm()) {
            return Ok(x);
        }
    }
    if r.norm() <= 1e-9 * (1.0 + x.norm()) {
        Ok(x)
    } else {
        Err(Error::NoConvergence(format!(
            "{NEWTON_MAX_ITER} Newton iterations, residual {:e}",
            r.norm()
        )))
    }
}

/// Fixed point of the cycle map by damped Newton, seeded from the averaged
/// model and, failing that, from the mean of a long simulation.
pub fn steady_state(stepper: &Stepper) -> Result<SteadyState> {
    let seed = averaged_operating_point(stepper.system())
        .map(|(x, _)| x)
        .unwrap_or_else(|_| StateVector::zeros(stepper.system().dim()));
    let x = match newton(stepper, seed) {
        Ok(x) => x,
        Err(first) => {
            let opts = SimOptions { cycles: 2048, window: 256, ..SimOptions::default() };
            let tail_mean = match simulate(stepper, InitialState::Auto, &opts) {
                Ok(tr) => {
                    let tail = &tr.strobe[tr.strobe.len() - opts.window..];
                    tail.iter().fold(StateVector::zeros(tail[0].len()), |acc, x| acc + x) / tail.len() as f64
                }
                Err(_) => return Err(first),
            };
            newton(stepper, tail_mean)?
        }
    };
    let (_, duty) = stepper.step(&x)?;
    Ok(SteadyState { x, duty })
}

/// Peak-to-peak output ripple `|D² − D| T² v_s / 8LC` without ESR.
pub fn ripple_check(params: &BuckParams, d: f64) -> Result<f64> {
    if params.r_c != 0.0 {
        return Err(Error::invalid("ripple_check requires R_c = 0"));
    }
    let c = params.capacitance()?;
    let t = params.period();
    Ok((d * d - d).abs() * t * t * params.v_s / (8.0 * params.l * c))
}
