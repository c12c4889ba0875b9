use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use subharmonic_core::sampled::CrossingDirection;
use subharmonic_core::schemes::{
    acmc_window_estimate, combined_gain, contour_data, lplot, loop_gain_hf, lvalue, solve_critical, DutySpec, Sweep,
};
use subharmonic_core::sim::{InitialState, SimTrace};
use subharmonic_core::transform::{f_transform_series_tf, DEFAULT_TERMS};
use subharmonic_core::{
    build_closed_loop, pole_trajectory, poles, simulate, ControlScheme, CriticalResult, Error, SimOptions,
    Stepper, SweepVariable,
};

use crate::config::{ConfigError, RunConfig, SweepSpec};
use crate::csv::{real, Table};
use crate::Common;

/// Report lines go to stdout, or to stderr while stdout carries the CSV.
struct Report {
    to_stderr: bool,
}

impl Report {
    fn new(out: Option<&Path>) -> Self {
        Report { to_stderr: out.is_none() }
    }

    fn line(&self, s: impl AsRef<str>) {
        if self.to_stderr {
            eprintln!("{}", s.as_ref());
        } else {
            println!("{}", s.as_ref());
        }
    }
}

/// Configuration merged with command-line overrides.
struct Run {
    cfg: RunConfig,
    out: Option<PathBuf>,
    sweep: Option<SweepSpec>,
}

fn load(common: &Common) -> Result<Run> {
    let Some(path) = &common.config else {
        bail!(ConfigError("--config is required".into()));
    };
    let cfg = RunConfig::load(path)?;
    for w in cfg.scheme.warnings(&cfg.params) {
        eprintln!("warning: {w}");
    }
    let sweep = match common.sweep.as_slice() {
        [] => cfg.sweep.clone(),
        [s] => Some(SweepSpec::parse(s)?),
        _ => bail!(ConfigError("this command takes a single --sweep".into())),
    };
    let out = common.out.clone().or_else(|| cfg.out.clone());
    Ok(Run { cfg, out, sweep })
}

fn list(xs: &[f64]) -> String {
    if xs.is_empty() {
        "none".to_string()
    } else {
        xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
    }
}

fn duty_label(spec: &DutySpec) -> &'static str {
    match spec {
        DutySpec::Fixed(_) => "fixed",
        DutySpec::Nominal => "nominal",
    }
}

pub fn critical(common: &Common) -> Result<()> {
    let run = load(common)?;
    let (params, scheme) = (&run.cfg.params, &run.cfg.scheme);
    let duty = run.cfg.duty.resolve(params, scheme)?;
    let l = lvalue(params, scheme, duty)?;
    let verdict = CriticalResult::from_lvalue(l);
    let mut rows: Vec<(String, String)> = vec![
        ("scheme".into(), scheme.name().into()),
        ("duty".into(), duty.get().to_string()),
        ("duty_source".into(), duty_label(&run.cfg.duty).into()),
        ("lvalue".into(), l.to_string()),
    ];
    if params.ramp_amplitude() > 0.0 {
        let terms = common.terms.or(run.cfg.terms).unwrap_or(DEFAULT_TERMS);
        let t = loop_gain_hf(params, scheme)?;
        let series = f_transform_series_tf(&t, duty, params.omega_s(), terms)?;
        rows.push(("lvalue_series".into(), series.to_string()));
        rows.push(("series_terms".into(), terms.to_string()));
    }
    rows.push(("verdict".into(), if verdict.stable { "stable" } else { "unstable" }.into()));
    if let Some(target) = common.solve_for.or(run.cfg.solve_for) {
        let roots = solve_critical(params, scheme, run.cfg.duty, target)?;
        for r in roots {
            rows.push((format!("critical_{target}"), r.to_string()));
        }
    }
    for (k, v) in &rows {
        println!("{k} = {v}");
    }
    if let Some(out) = &run.out {
        let mut t = Table::new(&["quantity", "value"]);
        for (k, v) in rows {
            let v = v.parse::<f64>().map(real).unwrap_or(v);
            t.row([k, v]);
        }
        t.emit(Some(out))?;
    }
    Ok(())
}

fn require_sweep(sweep: Option<SweepSpec>) -> Result<Sweep> {
    match sweep {
        Some(s) => Ok(s.build()?),
        None => bail!(ConfigError("a sweep is required (--sweep var:start:stop:n[:log] or `sweep` key)".into())),
    }
}

pub fn lplot_cmd(common: &Common) -> Result<()> {
    let run = load(common)?;
    let sweep = require_sweep(run.sweep)?;
    let curve = lplot(&run.cfg.params, &run.cfg.scheme, run.cfg.duty, &sweep)?;
    let mut t = Table::new(&[curve.variable.name(), "D", "L"]);
    for ((x, d), l) in curve.grid.iter().zip(&curve.duty).zip(&curve.lvalue) {
        t.row([real(*x), real(*d), real(*l)]);
    }
    t.emit(run.out.as_deref())?;
    let rep = Report::new(run.out.as_deref());
    rep.line(format!("crossings = {}", list(&curve.crossings)));
    if let Some((x, l)) = curve.peak() {
        rep.line(format!("peak = {l} at {} = {x}", curve.variable));
    }
    Ok(())
}

pub fn contour(common: &Common) -> Result<()> {
    // The kernel surface needs no configuration; a config adds the scaled 𝓛.
    let (cfg, out) = match &common.config {
        Some(_) => {
            let run = load(common)?;
            (Some(run.cfg), run.out)
        }
        None => (None, common.out.clone()),
    };
    let mut d_spec = SweepSpec::parse("D:0.01:0.99:99")?;
    let mut p_spec = SweepSpec::parse("p:0.01:10:100:log")?;
    for s in &common.sweep {
        let s = SweepSpec::parse(s)?;
        match s.variable {
            SweepVariable::Duty => d_spec = s,
            SweepVariable::PoleRatio => p_spec = s,
            other => bail!(ConfigError(format!("contour sweeps D and p, not {other}"))),
        }
    }
    let (ds, ps) = (d_spec.build()?.grid, p_spec.build()?.grid);
    let gain = match &cfg {
        Some(c) => match c.scheme {
            ControlScheme::Acmc { .. } | ControlScheme::Vmc3 { .. } => Some(combined_gain(&c.params, &c.scheme)?),
            _ => bail!(ConfigError("contour scales by the gain of an acmc or vmc3 scheme".into())),
        },
        None => None,
    };
    let surface = contour_data(&ds, &ps)?;
    let mut header = vec!["D", "p", "kernel"];
    if gain.is_some() {
        header.push("L");
    }
    let mut t = Table::new(&header);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for (d, row) in ds.iter().zip(&surface) {
        for (p, v) in ps.iter().zip(row) {
            if *v > best.0 {
                best = (*v, *d, *p);
            }
            let mut fields = vec![real(*d), real(*p), real(*v)];
            if let Some(k) = gain {
                fields.push(real(k * v));
            }
            t.row(fields);
        }
    }
    t.emit(out.as_deref())?;
    let rep = Report::new(out.as_deref());
    rep.line(format!("max_kernel = {} at D = {}, p = {}", best.0, best.1, best.2));
    if let Some(k) = gain {
        rep.line(format!("gain_K = {k}"));
        rep.line(format!("max_L = {}", k * best.0));
    }
    Ok(())
}

pub fn window(common: &Common) -> Result<()> {
    let run = load(common)?;
    let (params, scheme) = (&run.cfg.params, &run.cfg.scheme);
    if !matches!(scheme, ControlScheme::Acmc { .. } | ControlScheme::Vmc3 { .. }) {
        bail!(ConfigError(format!("window needs an acmc or vmc3 scheme, not {scheme}")));
    }
    let duty = run.cfg.duty.resolve(params, scheme)?;
    let k = combined_gain(params, scheme)?;
    let est = acmc_window_estimate(k, duty);
    let sweep = match run.sweep {
        Some(s) if s.variable == SweepVariable::PoleRatio => s.build()?,
        Some(s) => bail!(ConfigError(format!("window sweeps p, not {}", s.variable))),
        None => Sweep::log(SweepVariable::PoleRatio, 0.01, 2.0, 400)?,
    };
    let curve = lplot(params, scheme, run.cfg.duty, &sweep)?;

    let mut rows = vec![("gain_K".to_string(), k), ("duty".to_string(), duty.get())];
    if !est.is_empty() {
        rows.push(("estimate_low".into(), est.low));
        rows.push(("estimate_high".into(), est.high));
    }
    for (i, x) in curve.crossings.iter().enumerate() {
        rows.push((format!("lplot_crossing_{}", i + 1), *x));
    }
    let mut t = Table::new(&["quantity", "value"]);
    for (name, v) in &rows {
        t.row([name.clone(), real(*v)]);
    }
    t.emit(run.out.as_deref())?;
    let rep = Report::new(run.out.as_deref());
    rep.line(format!("gain_K = {k}"));
    if est.is_empty() {
        rep.line("estimate = empty");
    } else {
        rep.line(format!("estimate = [{}, {}]", est.low, est.high));
    }
    rep.line(format!("lplot_crossings = {}", list(&curve.crossings)));
    Ok(())
}

fn strobe_table(trace: &SimTrace) -> Table {
    let mut header = vec!["cycle", "t", "duty"];
    header.extend(trace.state_names.iter().map(String::as_str));
    let mut t = Table::new(&header);
    for (n, x) in trace.strobe.iter().enumerate() {
        let mut row = vec![n.to_string(), real(n as f64 * trace.period)];
        row.push(trace.duty.get(n).map(|d| real(*d)).unwrap_or_default());
        row.extend(x.iter().map(|v| real(*v)));
        t.row(row);
    }
    t
}

fn dense_table(trace: &SimTrace) -> Table {
    let mut header = vec!["t"];
    header.extend(trace.state_names.iter().map(String::as_str));
    header.extend(["y", "h", "v_d"]);
    let mut t = Table::new(&header);
    for s in &trace.dense {
        let mut row = vec![real(s.t)];
        row.extend(s.x.iter().map(|v| real(*v)));
        row.extend([real(s.y), real(s.h), real(s.v_d)]);
        t.row(row);
    }
    t
}

fn write_trace(trace: &SimTrace, out: Option<&Path>) -> Result<()> {
    if let Some(out) = out {
        dense_table(trace).emit(Some(out))?;
        strobe_table(trace).emit(Some(&out.with_extension("strobe.csv")))?;
    }
    Ok(())
}

/// Dense samples per cycle written by `simulate`.
const DENSE_PER_CYCLE: usize = 64;

pub fn simulate_cmd(common: &Common) -> Result<()> {
    let run = load(common)?;
    let defaults = SimOptions::default();
    let opts = SimOptions {
        cycles: common.cycles.or(run.cfg.cycles).unwrap_or(defaults.cycles),
        dense_per_cycle: if run.out.is_some() { DENSE_PER_CYCLE } else { 0 },
        ..defaults
    };
    let stepper = Stepper::new(build_closed_loop(&run.cfg.params, &run.cfg.scheme)?);
    match simulate(&stepper, InitialState::Auto, &opts) {
        Ok(trace) => {
            write_trace(&trace, run.out.as_deref())?;
            let w = trace.window_duties();
            println!("{}", trace.classification.map_or("other".to_string(), |c| c.to_string()));
            println!("window_duty_min = {}", w.iter().copied().fold(f64::INFINITY, f64::min));
            println!("window_duty_max = {}", w.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            Ok(())
        }
        Err(Error::Divergence { cycle, partial }) => {
            write_trace(&partial, run.out.as_deref())?;
            println!("diverged");
            Err(Error::Divergence { cycle, partial }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn pole_rows(t: &mut Table, value: Option<f64>, set: &std::result::Result<subharmonic_core::PoleSet, String>) {
    let lead: Vec<String> = value.map(real).into_iter().collect();
    match set {
        Ok(ps) => {
            for (i, z) in ps.eigenvalues.iter().enumerate() {
                let mut row = lead.clone();
                row.extend([i.to_string(), real(z.re), real(z.im), real(z.norm()), String::new()]);
                t.row(row);
            }
        }
        Err(e) => {
            let mut row = lead;
            row.extend([String::new(), String::new(), String::new(), String::new(), e.clone()]);
            t.row(row);
        }
    }
}

pub fn poles_cmd(common: &Common) -> Result<()> {
    let run = load(common)?;
    let (params, scheme) = (&run.cfg.params, &run.cfg.scheme);
    let rep = Report::new(run.out.as_deref());
    match run.sweep {
        None => {
            let set = poles(params, scheme).map_err(|e| e.to_string());
            let mut t = Table::new(&["index", "re", "im", "modulus", "error"]);
            pole_rows(&mut t, None, &set);
            t.emit(run.out.as_deref())?;
            match set {
                Ok(ps) => {
                    rep.line(format!("spectral_radius = {}", ps.spectral_radius));
                    rep.line(format!("duty = {}", ps.duty));
                    rep.line(format!("verdict = {}", if ps.is_stable() { "stable" } else { "unstable" }));
                }
                Err(e) => bail!(subharmonic_core::Error::NumericalFailure(e)),
            }
        }
        Some(spec) => {
            let sweep = spec.build()?;
            let tr = pole_trajectory(params, scheme, sweep.variable, &sweep.grid)?;
            let mut t = Table::new(&[tr.variable.name(), "index", "re", "im", "modulus", "error"]);
            for pt in &tr.points {
                pole_rows(&mut t, Some(pt.value), &pt.poles);
            }
            t.emit(run.out.as_deref())?;
            if tr.crossings.is_empty() {
                rep.line("crossings = none");
            }
            for c in &tr.crossings {
                let dir = match c.direction {
                    CrossingDirection::Exit => "exit",
                    CrossingDirection::Enter => "enter",
                };
                rep.line(format!("crossing = {} = {} ({dir}, eigenvalue {})", tr.variable, c.value, c.eigenvalue.re));
            }
            for (a, b, why) in &tr.failed_crossings {
                eprintln!("warning: crossing between {a} and {b} not refined: {why}");
            }
            let failed = tr.points.iter().filter(|p| p.poles.is_err()).count();
            if failed > 0 {
                eprintln!("warning: {failed} sweep points failed; see the error column");
            }
        }
    }
    Ok(())
}
