#![allow(dead_code)]

use subharmonic_core::{BuckParams, ControlScheme, DutyCycle, NormalizedFreq};

pub fn dc(x: f64) -> DutyCycle {
    DutyCycle::new(x).unwrap()
}

pub fn nf(x: f64) -> NormalizedFreq {
    NormalizedFreq::new(x).unwrap()
}

/// RL circuit under proportional feedback.
pub fn example1() -> BuckParams {
    BuckParams {
        v_s: 10.0,
        v_r: 7.5,
        v_l: 0.0,
        v_h: 1.0,
        f_s: 1e6,
        l: 1e-6,
        c: None,
        r: 1.0,
        r_c: 0.0,
    }
}

pub fn example1_scheme(k_p: f64) -> ControlScheme {
    ControlScheme::Rlp { k_p }
}

/// Average current mode.
pub fn example2() -> BuckParams {
    BuckParams {
        v_s: 14.0,
        v_r: 0.5,
        v_l: 0.0,
        v_h: 1.0,
        f_s: 50e3,
        l: 46.1e-6,
        c: Some(380e-6),
        r: 1.0,
        r_c: 0.02,
    }
}

pub fn example2_scheme(p: f64) -> ControlScheme {
    ControlScheme::Acmc {
        r_s: 0.1,
        k_c: 75506.0,
        z_c: 5652.9,
        omega_p: p * example2().omega_s(),
    }
}

/// Type-III voltage mode.
pub fn example3(v_s: f64) -> BuckParams {
    BuckParams {
        v_s,
        v_r: 3.3,
        v_l: 0.0,
        v_h: 1.5,
        f_s: 300e3,
        l: 900e-9,
        c: Some(990e-6),
        r: 0.4,
        r_c: 5e-3,
    }
}

pub fn example3_scheme(p: f64) -> ControlScheme {
    ControlScheme::Vmc3 {
        k_c: 7.78e4,
        kappa_z: 0.5,
        omega_p: p * example3(16.0).omega_s(),
    }
}
