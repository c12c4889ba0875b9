//! Subharmonic-oscillation analysis of PWM buck converters.
//!
//! The closed forms in [`schemes`] rest on the F-transform of the loop gain
//! ([`transform`]). [`sim`] and [`sampled`] provide the exact switched model
//! they are checked against.

pub mod error;
pub mod params;
pub mod roots;
pub mod sampled;
pub mod schemes;
pub mod sim;
pub mod tf;
pub mod transform;
pub mod units;

pub use error::{Error, Result};
pub use params::BuckParams;
pub use sampled::{pole_trajectory, poles, PoleSet, PoleTrajectory};
pub use schemes::{ControlScheme, CriticalResult, DutySpec, LPlotCurve, SolveFor, Sweep, SweepVariable};
pub use sim::{build_closed_loop, simulate, steady_state, Periodicity, SimOptions, SimTrace, StateVector, Stepper};
pub use tf::{Factor, RationalTF};
pub use transform::{alpha, alpha0, alpha1, correction, f_transform_case, f_transform_rational, f_transform_series, TableCase};
pub use units::{DutyCycle, NormalizedFreq};
