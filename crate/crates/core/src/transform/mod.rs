//! The F-transform: closed forms, catalog cases and the series oracle.

pub mod kernel;
pub mod rational;
pub mod series;
pub mod table;

pub use kernel::{alpha, alpha0, alpha1, correction, pole_integrator_kernel, taylor_coefficient};
pub use rational::{f_transform_rational, partial_fractions, PartialFractions};
pub use series::{f_transform_series, f_transform_series_tf, DEFAULT_TERMS};
pub use table::{f_transform_case, TableCase};
