use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use subharmonic_core::schemes::lvalue;
use subharmonic_core::transform::{f_transform_series, DEFAULT_TERMS};
use subharmonic_core::{
    alpha, build_closed_loop, poles, steady_state, BuckParams, ControlScheme, DutyCycle, NormalizedFreq, Stepper,
};

fn type3() -> (BuckParams, ControlScheme) {
    let params = BuckParams {
        v_s: 16.0,
        v_r: 3.3,
        v_l: 0.0,
        v_h: 1.5,
        f_s: 300e3,
        l: 900e-9,
        c: Some(990e-6),
        r: 0.4,
        r_c: 5e-3,
    };
    let scheme = ControlScheme::Vmc3 {
        k_c: 7.78e4,
        kappa_z: 0.5,
        omega_p: 0.3 * params.omega_s(),
    };
    (params, scheme)
}

fn closed_forms(c: &mut Criterion) {
    let d = DutyCycle::new(0.3).unwrap();
    let p = NormalizedFreq::new(0.5).unwrap();
    c.bench_function("alpha", |b| b.iter(|| alpha(black_box(d), black_box(p))));
    let (params, scheme) = type3();
    c.bench_function("lvalue_vmc3", |b| b.iter(|| lvalue(black_box(&params), &scheme, d).unwrap()));
    c.bench_function("series_oracle_first_order", |b| {
        b.iter(|| f_transform_series(|s| 1.0 / (s + 0.5), black_box(d), 1.0, DEFAULT_TERMS).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let (params, scheme) = type3();
    let stepper = Stepper::new(build_closed_loop(&params, &scheme).unwrap());
    let x = steady_state(&stepper).unwrap().x;
    c.bench_function("step_cycle_vmc3", |b| b.iter(|| stepper.step(black_box(&x)).unwrap()));
    c.bench_function("steady_state_vmc3", |b| b.iter(|| steady_state(black_box(&stepper)).unwrap()));
    c.bench_function("poles_vmc3", |b| b.iter(|| poles(black_box(&params), &scheme).unwrap()));
}

criterion_group!(benches, closed_forms, simulation);
criterion_main!(benches);
