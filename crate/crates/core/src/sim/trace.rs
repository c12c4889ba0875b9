use std::fmt;

use crate::error::{Error, Result};

use super::model::StateVector;
use super::step::Stepper;

/// Relative tolerance of the periodicity tests.
pub const PERIODICITY_TOLERANCE: f64 = 1e-8;

/// Long-run behaviour over the classification window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    Period1,
    Period2,
    Period4,
    Other,
}

impl fmt::Display for Periodicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Periodicity::Period1 => "period-1",
            Periodicity::Period2 => "period-2",
            Periodicity::Period4 => "period-4",
            Periodicity::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<'a> {
    /// All states zero.
    Auto,
    Given(&'a StateVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Total cycles; the first `cycles − window` are discarded as transient.
    pub cycles: usize,
    pub window: usize,
    /// Dense samples per cycle (0 disables dense output).
    pub dense_per_cycle: usize,
    /// Number of final cycles recorded densely.
    pub dense_cycles: usize,
    /// Any state magnitude above this aborts the run.
    pub divergence_bound: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            cycles: 576,
            window: 64,
            dense_per_cycle: 0,
            dense_cycles: 64,
            divergence_bound: 1e6,
        }
    }
}

/// One dense sample inside a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: f64,
    pub h: f64,
    /// Diode-node voltage: `v_s` in S₁, 0 in S₂.
    pub v_d: f64,
}

/// Record of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub state_names: Vec<String>,
    pub period: f64,
    /// `x(nT)` for `n = 0..=cycles` (fewer if the run diverged).
    pub strobe: Vec<StateVector>,
    /// Duty of cycle `n`, between `strobe[n]` and `strobe[n + 1]`.
    pub duty: Vec<f64>,
    pub dense: Vec<DenseSample>,
    pub window: usize,
    /// `None` when the run diverged.
    pub classification: Option<Periodicity>,
}

impl SimTrace {
    /// Duties inside the classification window.
    pub fn window_duties(&self) -> &[f64] {
        &self.duty[self.duty.len().saturating_sub(self.window)..]
    }
}

fn repeats(xs: &[StateVector], k: usize) -> bool {
    xs.windows(k + 1).all(|w| {
        let (a, b) = (&w[0], &w[k]);
        (b - a).norm() <= PERIODICITY_TOLERANCE * (1.0 + a.norm())
    })
}

/// Classify stroboscopic samples spanning the window (`window + 1` points).
pub fn classify(strobe: &[StateVector], duty: &[f64]) -> Periodicity {
    if !duty.is_empty() && duty.iter().all(|&d| d <= 0.0 || d >= 1.0) {
        return Periodicity::Other;
    }
    [(1, Periodicity::Period1), (2, Periodicity::Period2), (4, Periodicity::Period4)]
        .into_iter()
        .find(|&(k, _)| strobe.len() > k && repeats(strobe, k))
        .map_or(Periodicity::Other, |(_, p)| p)
}

/// Run the switched converter for `opts.cycles` periods and classify the tail.
pub fn simulate(stepper: &Stepper, init: InitialState<'_>, opts: &SimOptions) -> Result<SimTrace> {
    if opts.window == 0 || opts.cycles < opts.window {
        return Err(Error::invalid(format!(
            "need cycles ≥ window ≥ 1, got {} and {}",
            opts.cycles, opts.window
        )));
    }
    let sys = stepper.system();
    let n = sys.dim();
    let x0 = match init {
        InitialState::Auto => StateVector::zeros(n),
        InitialState::Given(x) if x.len() == n => x.clone(),
        InitialState::Given(x) => {
            return Err(Error::invalid(format!("initial state has {} entries, expected {n}", x.len())))
        }
    };
    let mut trace = SimTrace {
        state_names: sys.state_names.clone(),
        period: sys.period,
        strobe: Vec::with_capacity(opts.cycles + 1),
        duty: Vec::with_capacity(opts.cycles),
        dense: Vec::new(),
        window: opts.window,
        classification: None,
    };
    let dense_from = opts.cycles.saturating_sub(opts.dense_cycles);
    let mut x = x0;
    for cycle in 0..opts.cycles {
        if x.iter().any(|v| !v.is_finite() || v.abs() > opts.divergence_bound) {
            trace.strobe.push(x);
            return Err(Error::Divergence { cycle, partial: Box::new(trace) });
        }
        let (next, d) = stepper.step(&x)?;
        if opts.dense_per_cycle > 0 && cycle >= dense_from {
            push_dense(stepper, &x, d, cycle, opts.dense_per_cycle, &mut trace.dense);
        }
        trace.strobe.push(std::mem::replace(&mut x, next));
        trace.duty.push(d);
    }
    if x.iter().any(|v| !v.is_finite() || v.abs() > opts.divergence_bound) {
        trace.strobe.push(x);
        return Err(Error::Divergence { cycle: opts.cycles, partial: Box::new(trace) });
    }
    trace.strobe.push(x);
    let strobe_tail = &trace.strobe[trace.strobe.len() - opts.window - 1..];
    trace.classification = Some(classify(strobe_tail, trace.window_duties()));
    Ok(trace)
}

fn push_dense(stepper: &Stepper, x0: &StateVector, duty: f64, cycle: usize, m: usize, out: &mut Vec<DenseSample>) {
    let sys = stepper.system();
    let t_sw = duty * sys.period;
    let start = cycle as f64 * sys.period;
    for j in 0..m {
        let tau = j as f64 * sys.period / m as f64;
        let x = stepper.state_at(x0, t_sw, tau);
        let on = tau < t_sw;
        out.push(DenseSample {
            t: start + tau,
            y: sys.output_y(&x),
            h: sys.ramp(tau),
            v_d: if on { sys.v_s } else { 0.0 },
            x: x.iter().copied().collect(),
        });
    }
}
