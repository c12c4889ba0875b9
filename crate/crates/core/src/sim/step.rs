use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::model::{ClosedLoop, StateVector};

/// Uniform samples of `y − h` per cycle used to bracket the switching instant.
pub const CROSSING_SAMPLES: usize = 64;

/// Bracket width, as a fraction of `T`, at which the switching instant is accepted.
pub const CROSSING_TOLERANCE: f64 = 1e-13;

/// Exact solution map `x(t) = Φ x(0) + γ` of `ẋ = A x + b` over a fixed time.
#[derive(Debug, Clone)]
pub struct Affine {
    phi: DMatrix<f64>,
    gamma: DVector<f64>,
}

impl Affine {
    pub fn new(a: &DMatrix<f64>, b: &DVector<f64>, t: f64) -> Self {
        let n = b.len();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&(a * t));
        m.view_mut((0, n), (n, 1)).copy_from(&(b * t));
        let e = m.exp();
        Affine {
            phi: e.view((0, 0), (n, n)).into_owned(),
            gamma: e.view((0, n), (n, 1)).column(0).into_owned(),
        }
    }

    pub fn apply(&self, x: &StateVector) -> StateVector {
        &self.phi * x + &self.gamma
    }
}

/// Closed loop with the propagators needed by [`Stepper::step`] cached.
#[derive(Debug, Clone)]
pub struct Stepper {
    sys: ClosedLoop,
    samples: usize,
    on_sample: Affine,
    on_full: Affine,
    off_full: Affine,
}

impl Stepper {
    pub fn new(sys: ClosedLoop) -> Self {
        Self::with_samples(sys, CROSSING_SAMPLES)
    }

    /// Stepper bracketing the switching instant on `samples` points per cycle.
    pub fn with_samples(sys: ClosedLoop, samples: usize) -> Self {
        let samples = samples.max(1);
        let t = sys.period;
        Stepper {
            samples,
            on_sample: Affine::new(&sys.a, &sys.b_on, t / samples as f64),
            on_full: Affine::new(&sys.a, &sys.b_on, t),
            off_full: Affine::new(&sys.a, &sys.b_off, t),
            sys,
        }
    }

    pub fn system(&self) -> &ClosedLoop {
        &self.sys
    }

    fn gap(&self, x: &StateVector, t: f64) -> f64 {
        self.sys.output_y(x) - self.sys.ramp(t)
    }

    /// State at time `t` into a cycle that started at `x0` and switched at `t_sw`.
    pub fn state_at(&self, x0: &StateVector, t_sw: f64, t: f64) -> StateVector {
        let s = &self.sys;
        if t <= t_sw {
            Affine::new(&s.a, &s.b_on, t).apply(x0)
        } else {
            let x_sw = Affine::new(&s.a, &s.b_on, t_sw).apply(x0);
            Affine::new(&s.a, &s.b_off, t - t_sw).apply(&x_sw)
        }
    }

    /// Switching instant of the cycle starting at `x0`, in seconds.
    pub fn switching_time(&self, x0: &StateVector) -> Result<f64> {
        let s = &self.sys;
        let t = s.period;
        if self.gap(x0, 0.0) <= 0.0 {
            return Ok(0.0);
        }
        let h = t / self.samples as f64;
        let mut x = x0.clone();
        for k in 1..=self.samples {
            let next = self.on_sample.apply(&x);
            let t1 = k as f64 * h;
            let g1 = self.gap(&next, t1);
            if !g1.is_finite() {
                return Err(Error::NumericalFailure(format!("non-finite modulator input at t = {t1:e}")));
            }
            if g1 <= 0.0 {
                return self.refine(&x, (k - 1) as f64 * h, t1);
            }
            x = next;
        }
        Ok(t)
    }

    // Bisection for the sign change of y − h inside [t0, t1], starting from x(t0).
    fn refine(&self, x0: &StateVector, t0: f64, t1: f64) -> Result<f64> {
        let s = &self.sys;
        let tol = CROSSING_TOLERANCE * s.period;
        let (mut lo, mut hi) = (t0, t1);
        let mut g_lo = self.gap(x0, t0);
        let mut g_hi = self.gap(&Affine::new(&s.a, &s.b_on, t1 - t0).apply(x0), t1);
        for _ in 0..100 {
            if hi - lo <= tol {
                // Linear interpolation inside the final bracket keeps the
                // instant a smooth function of the initial state.
                let w = if g_lo - g_hi > 0.0 { g_lo / (g_lo - g_hi) } else { 0.5 };
                return Ok(lo + w.clamp(0.0, 1.0) * (hi - lo));
            }
            let mid = 0.5 * (lo + hi);
            let g = self.gap(&Affine::new(&s.a, &s.b_on, mid - t0).apply(x0), mid);
            if g > 0.0 {
                lo = mid;
                g_lo = g;
            } else {
                hi = mid;
                g_hi = g;
            }
        }
        Err(Error::NumericalFailure(format!(
            "switching instant not resolved in [{t0:e}, {t1:e}]"
        )))
    }

    /// One switching period from `x0`: the next cycle-start state and the duty.
    pub fn step(&self, x0: &StateVector) -> Result<(StateVector, f64)> {
        let s = &self.sys;
        let t = s.period;
        let t_sw = self.switching_time(x0)?;
        let x1 = if t_sw <= 0.0 {
            self.off_full.apply(x0)
        } else if t_sw >= t {
            self.on_full.apply(x0)
        } else {
            let x_sw = Affine::new(&s.a, &s.b_on, t_sw).apply(x0);
            Affine::new(&s.a, &s.b_off, t - t_sw).apply(&x_sw)
        };
        Ok((x1, t_sw / t))
    }
}

/// One cycle of the closed loop. Builds the propagators each call; use
/// [`Stepper`] for repeated steps.
pub fn step_cycle(sys: &ClosedLoop, x0: &StateVector) -> Result<(StateVector, f64)> {
    Stepper::new(sys.clone()).step(x0)
}
