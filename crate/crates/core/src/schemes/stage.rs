use crate::error::{Error, Result};
use crate::params::BuckParams;
use crate::tf::{Factor, RationalTF};

use super::ControlScheme;

fn lc_denominator(params: &BuckParams, c: f64) -> Factor {
    // (LC/ρ)s² + (L/R + R_c C)s + 1
    let omega_n = (params.rho() / (params.l * c)).sqrt();
    let zeta = 0.5 * omega_n * (params.l / params.r + params.r_c * c);
    Factor::Quadratic { omega_n, zeta }
}

/// `v_d → v_o` of the LC stage with ESR.
pub fn power_stage_vo(params: &BuckParams) -> Result<RationalTF> {
    let c = params.capacitance()?;
    let zeros = if params.r_c > 0.0 {
        vec![Factor::Real(1.0 / (params.r_c * c))]
    } else {
        vec![]
    };
    RationalTF::from_factors(1.0, zeros, vec![lc_denominator(params, c)], 0)
}

/// `v_d → i_L` of the LC stage with ESR.
pub fn power_stage_il(params: &BuckParams) -> Result<RationalTF> {
    let c = params.capacitance()?;
    // ((C/ρ)s + 1/R) = (1/R)(1 + s RC/ρ)
    let zero = params.rho() / (params.r * c);
    RationalTF::from_factors(
        1.0 / params.r,
        vec![Factor::Real(zero)],
        vec![lc_denominator(params, c)],
        0,
    )
}

/// High-frequency approximation of the loop gain `T(s)` used by the closed forms.
pub fn loop_gain_hf(params: &BuckParams, scheme: &ControlScheme) -> Result<RationalTF> {
    let v_m = params.ramp_amplitude();
    if v_m <= 0.0 {
        return Err(Error::domain("loop gain is unbounded without a ramp (V_m = 0)"));
    }
    let base = params.v_s / v_m;
    match *scheme {
        ControlScheme::Cmc => RationalTF::new(base / params.l, &[], &[], 1),
        ControlScheme::Pvmc { k_p } | ControlScheme::Cfpvr { k_p } => {
            let c = params.capacitance()?;
            if params.r_c > 0.0 {
                RationalTF::new(
                    base * k_p * params.rho() / (params.l * c),
                    &[1.0 / (params.r_c * c)],
                    &[],
                    2,
                )
            } else {
                RationalTF::new(base * k_p * params.r / params.l, &[], &[1.0 / (params.r * c)], 1)
            }
        }
        ControlScheme::Rlp { k_p } => RationalTF::new(base * k_p, &[], &[params.r / params.l], 0),
        ControlScheme::Acmc { r_s, k_c, z_c, omega_p } => {
            RationalTF::new(base * r_s * k_c / (z_c * params.l), &[], &[omega_p], 1)
        }
        ControlScheme::Vmc3 { k_c, kappa_z, omega_p } => {
            RationalTF::new(base * k_c * params.rho() / kappa_z, &[], &[omega_p], 1)
        }
    }
}

/// Type-III compensator `K_c(1 + √LC s/κ_z)(1 + √LC s) / (s(1 + s/ω_p)(1 + R_c C s))`.
pub fn type3_compensator(params: &BuckParams, k_c: f64, kappa_z: f64, omega_p: f64) -> Result<RationalTF> {
    let c = params.capacitance()?;
    let w0 = 1.0 / (params.l * c).sqrt();
    let mut poles = vec![omega_p];
    if params.r_c > 0.0 {
        poles.push(1.0 / (params.r_c * c));
    }
    RationalTF::new(k_c, &[kappa_z * w0, w0], &poles, 1)
}

/// Dynamic compensator of the scheme, from its error input to `y`.
///
/// `None` for the static (proportional or current) schemes. The ACMC error
/// input is `v_r − R_s i_L`, so `R_s` is not part of the returned gain.
pub fn compensator(params: &BuckParams, scheme: &ControlScheme) -> Result<Option<RationalTF>> {
    match *scheme {
        ControlScheme::Acmc { k_c, z_c, omega_p, .. } => {
            Ok(Some(RationalTF::new(k_c, &[z_c], &[omega_p], 1)?))
        }
        ControlScheme::Vmc3 { k_c, kappa_z, omega_p } => {
            Ok(Some(type3_compensator(params, k_c, kappa_z, omega_p)?))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ex3() -> BuckParams {
        BuckParams {
            v_s: 16.0,
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

    #[test]
    fn power_stage_shapes() {
        let p = ex3();
        let vo = power_stage_vo(&p).unwrap();
        assert!((vo.eval(Complex64::new(0.0, 0.0)).re - 1.0).abs() < 1e-12);
        match vo.zeros()[0] {
            Factor::Real(w) => assert!((w - 2.02e5).abs() / 2.02e5 < 0.005),
            _ => panic!(),
        }
        let il = power_stage_il(&p).unwrap();
        assert!((il.eval(Complex64::new(0.0, 0.0)).re - 1.0 / p.r).abs() < 1e-12);
        let w = 1e9;
        assert!((il.freq_response(w).norm() * p.l * w - 1.0).abs() < 1e-3);

        let no_esr = BuckParams { r_c: 0.0, ..p.clone() };
        let vo = power_stage_vo(&no_esr).unwrap();
        assert!(vo.zeros().is_empty());
        let den = vo.denominator();
        assert!((den[2] - p.l * p.c.unwrap()).abs() < 1e-20);
        assert!((den[1] - p.l / p.r).abs() < 1e-15);
    }

    #[test]
    fn missing_capacitor() {
        let p = BuckParams { c: None, ..ex3() };
        assert!(matches!(power_stage_vo(&p), Err(Error::MissingParameter("C"))));
        assert!(matches!(
            loop_gain_hf(&p, &ControlScheme::Pvmc { k_p: 1.0 }),
            Err(Error::MissingParameter("C"))
        ));
    }

    #[test]
    fn cmc_loop_gain() {
        let p = BuckParams { v_s: 10.0, l: 1e-6, v_l: 0.0, v_h: 1.0, ..ex3() };
        let t = loop_gain_hf(&p, &ControlScheme::Cmc).unwrap();
        assert!((t.scale() - 1e7).abs() < 1e-3);
        assert_eq!(t.integrators(), 1);
    }

    #[test]
    fn vmc3_matches_full_loop_at_high_frequency() {
        let p = ex3();
        let omega_p = p.omega_s() / 2.0;
        let scheme = ControlScheme::Vmc3 { k_c: 7.78e4, kappa_z: 0.5, omega_p };
        let gc = type3_compensator(&p, 7.78e4, 0.5, omega_p).unwrap();
        let full = (&gc * &power_stage_vo(&p).unwrap()) * (p.v_s / p.ramp_amplitude());
        let hf = loop_gain_hf(&p, &scheme).unwrap();
        let w = 20.0 * p.omega_s();
        let ratio = full.freq_response(w) / hf.freq_response(w);
        assert!((ratio - 1.0).norm() < 0.01, "{ratio}");
    }
}
