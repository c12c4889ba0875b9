//! Exact switched simulation of the closed-loop buck converter.
//!
//! Each stage is affine, so a cycle is propagated with matrix exponentials;
//! only the switching instant is found numerically.

mod model;
mod steady;
mod step;
mod trace;

pub use model::{build_closed_loop, realize, ClosedLoop, StateSpace, StateVector};
pub use steady::{
    averaged_operating_point, cycle_jacobian, ripple_check, steady_state, SteadyState, JACOBIAN_STEP,
};
pub use step::{step_cycle, Affine, Stepper, CROSSING_SAMPLES, CROSSING_TOLERANCE};
pub use trace::{
    classify, simulate, DenseSample, InitialState, Periodicity, SimOptions, SimTrace,
    PERIODICITY_TOLERANCE,
};
