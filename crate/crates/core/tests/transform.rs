//! Invariants of the F-transform: closed forms against the series oracle,
//! catalog reductions, linearity and symmetry.

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use subharmonic_core::transform::{
    alpha, alpha0, alpha1, correction, f_transform_case, f_transform_rational, f_transform_series,
    f_transform_series_tf, TableCase, DEFAULT_TERMS,
};
use subharmonic_core::{DutyCycle, NormalizedFreq, RationalTF};

fn dc(x: f64) -> DutyCycle {
    DutyCycle::new(x).unwrap()
}

fn nf(x: f64) -> NormalizedFreq {
    NormalizedFreq::new(x).unwrap()
}

fn duty_grid() -> Vec<f64> {
    (1..=19).map(|i| 0.05 * i as f64).collect()
}

fn p_grid() -> Vec<f64> {
    subharmonic_core::roots::grid(0.01, 3.0, 20, true).unwrap()
}

#[test]
fn first_order_pole_matches_series() {
    let ws = 1.0;
    let mut worst = 0.0f64;
    for d in duty_grid() {
        for p in p_grid() {
            let series = f_transform_series(|s| 1.0 / (s + p * ws), dc(d), ws, DEFAULT_TERMS).unwrap();
            worst = worst.max((series - alpha(dc(d), nf(p)) / ws).abs());
        }
    }
    assert!(worst <= 1e-6, "max deviation {worst:e}");
}

#[test]
fn c5_identity() {
    for d in duty_grid() {
        for p in p_grid() {
            let (d, p) = (dc(d), nf(p));
            let lhs = alpha1(d) * p.get() - correction(d, p);
            let rhs = alpha0(d) - alpha(d, p);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0), "{lhs} {rhs}");
        }
    }
}

#[test]
fn reductions() {
    let ws = 2.0e5;
    for &d in &[0.1, 0.4, 0.5, 0.77] {
        let d = dc(d);
        let c2 = f_transform_case(TableCase::C2, d, ws).unwrap();
        let c6 = f_transform_case(TableCase::C6, d, ws).unwrap();
        let c1 = f_transform_case(TableCase::C1 { p: nf(1e-7) }, d, ws).unwrap();
        assert_relative_eq!(c1, c2, epsilon = 1e-9, max_relative = 1e-6);

        // C5 and C8 carry a factor ω_p relative to their limits.
        let p = 1e-8;
        let c5 = f_transform_case(TableCase::C5 { p: nf(p) }, d, ws).unwrap();
        assert_relative_eq!(c5 / (p * ws), c6, max_relative = 1e-5);
        let z = nf(0.3);
        let c7 = f_transform_case(TableCase::C7 { z }, d, ws).unwrap();
        let c8 = f_transform_case(TableCase::C8 { p: nf(p), z }, d, ws).unwrap();
        assert_relative_eq!(c8 / (p * ws), c7, max_relative = 1e-5);

        let far = f_transform_case(TableCase::C7 { z: nf(1e9) }, d, ws).unwrap();
        assert_relative_eq!(far, c6, max_relative = 1e-8);

        // C4 = (p/z)·1 + p(1 − p/z)·ω_s·C1, with F[1] = −1.
        let (p, z) = (0.37, 1.3);
        let c4 = f_transform_case(TableCase::C4 { p: nf(p), z: nf(z) }, d, ws).unwrap();
        let c1 = f_transform_case(TableCase::C1 { p: nf(p) }, d, ws).unwrap();
        assert_relative_eq!(c4, -p / z + p * (1.0 - p / z) * ws * c1, max_relative = 1e-12);
    }
}

#[test]
fn every_case_matches_its_series() {
    let ws = 1.0;
    let z = 0.45;
    for &d in &[0.05, 0.3, 0.5, 0.85] {
        for &p in &[0.01, 0.2, 1.0, 3.0] {
            let cases = [
                TableCase::C1 { p: nf(p) },
                TableCase::C2,
                TableCase::C3 { p: nf(p) },
                TableCase::C4 { p: nf(p), z: nf(z) },
                TableCase::C5 { p: nf(p) },
                TableCase::C6,
                TableCase::C7 { z: nf(z) },
                TableCase::C8 { p: nf(p), z: nf(z) },
                TableCase::C9 { p: nf(p), z: nf(z) },
            ];
            for case in cases {
                let tf = case.transfer_function(ws).unwrap();
                let closed = f_transform_case(case, dc(d), ws).unwrap();
                let series = f_transform_series_tf(&tf, dc(d), ws, DEFAULT_TERMS).unwrap();
                let rational = f_transform_rational(&tf, dc(d), ws).unwrap();
                assert!((closed - series).abs() <= 1e-6, "{} D={d} p={p}: {closed} vs {series}", case.id());
                assert!((closed - rational).abs() <= 1e-9 * (1.0 + closed.abs()), "{}", case.id());
            }
        }
    }
}

#[test]
fn symmetries() {
    for d in duty_grid() {
        assert_relative_eq!(alpha0(dc(d)), -alpha0(dc(1.0 - d)), epsilon = 1e-15, max_relative = 1e-14);
        assert_relative_eq!(alpha1(dc(d)), alpha1(dc(1.0 - d)), max_relative = 1e-15);
        assert_eq!(correction(dc(d), NormalizedFreq::ZERO), 0.0);
        let c6 = f_transform_case(TableCase::C6, dc(d), 3.0).unwrap();
        let c6m = f_transform_case(TableCase::C6, dc(1.0 - d), 3.0).unwrap();
        assert_relative_eq!(c6, c6m, max_relative = 1e-15);
    }
}

#[test]
fn correction_grows_for_large_p() {
    for d in duty_grid() {
        let mut prev = correction(dc(d), nf(1.0));
        for i in 1..=60 {
            let c = correction(dc(d), nf(1.0 + 0.05 * i as f64));
            assert!(c > prev, "D={d}");
            prev = c;
        }
    }
}

#[test]
fn examples_from_the_catalog() {
    assert_relative_eq!(
        f_transform_case(TableCase::C2, dc(0.75), 2.0 * std::f64::consts::PI).unwrap(),
        0.25,
        max_relative = 1e-15
    );
    let one = RationalTF::constant(1.0);
    assert_relative_eq!(f_transform_series_tf(&one, dc(0.3), 1.0, 1000).unwrap(), -1.0);
    let int = f_transform_series(|s| 1.0 / s, dc(0.5), 1.0, DEFAULT_TERMS).unwrap();
    assert!(int.abs() < 1e-9);
    // 1/s² at D = 0.3
    let t = RationalTF::new(1.0, &[], &[], 2).unwrap();
    let v = f_transform_series_tf(&t, dc(0.3), 5.0, DEFAULT_TERMS).unwrap();
    assert!((v - alpha1(dc(0.3)) / 25.0).abs() < 1e-6);
    // α(0.3, 0.5) against the summed series
    let s = f_transform_series(|s| 1.0 / (s + 0.5), dc(0.3), 1.0, DEFAULT_TERMS).unwrap();
    assert!((s - alpha(dc(0.3), nf(0.5))).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_is_linear(
        d in 0.02f64..0.98,
        p1 in 0.02f64..3.0,
        p2 in 0.02f64..3.0,
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let t1 = |s: Complex64| 1.0 / (s + p1);
        let t2 = |s: Complex64| 1.0 / (s * (1.0 + s / p2));
        let both = |s: Complex64| a * t1(s) + b * t2(s);
        let k = 4000;
        let f1 = f_transform_series(t1, dc(d), 1.0, k).unwrap();
        let f2 = f_transform_series(t2, dc(d), 1.0, k).unwrap();
        let f12 = f_transform_series(both, dc(d), 1.0, k).unwrap();
        let expect = a * f1 + b * f2;
        let scale = (a * f1).abs() + (b * f2).abs() + 1e-12;
        prop_assert!((f12 - expect).abs() <= 1e-10 * scale, "{} vs {}", f12, expect);
    }

    #[test]
    fn alpha_matches_kernel_decomposition(d in 0.0f64..=1.0, p in 0.0f64..5.0) {
        let (d, p) = (dc(d), nf(p));
        let c = correction(d, p);
        prop_assert!((alpha(d, p) - (alpha0(d) - alpha1(d) * p.get() + c)).abs() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn rational_matches_table(d in 0.01f64..0.99, p in 0.005f64..4.0, z in 0.05f64..4.0) {
        prop_assume!((p - z).abs() > 1e-3);
        let ws = 7.0e4;
        let case = TableCase::C9 { p: nf(p), z: nf(z) };
        let tf = case.transfer_function(ws).unwrap();
        let closed = f_transform_case(case, dc(d), ws).unwrap();
        let rational = f_transform_rational(&tf, dc(d), ws).unwrap();
        prop_assert!((closed - rational).abs() <= 1e-9 * closed.abs().max(1e-14));
    }
}

#[test]
fn biproper_with_large_feedthrough_converges() {
    // T(∞) = p/z = 60; the remainder must not be formed by subtracting it numerically.
    for &d in &[0.25, 0.5, 0.65] {
        let case = TableCase::C4 { p: nf(3.0), z: nf(0.05) };
        let tf = case.transfer_function(1.0).unwrap();
        let closed = f_transform_case(case, dc(d), 1.0).unwrap();
        let series = f_transform_series_tf(&tf, dc(d), 1.0, DEFAULT_TERMS).unwrap();
        assert!((closed - series).abs() <= 1e-9, "D={d}: {closed} vs {series}");
    }
}
