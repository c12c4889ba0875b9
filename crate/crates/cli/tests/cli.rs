//! End-to-end runs of the `subharmonic` binary on the checked-in scenarios.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subharmonic"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Parameter values of `crossing = var = x (direction, ...)` report lines.
fn pole_crossings(report: &str) -> Vec<f64> {
    report
        .lines()
        .filter_map(|l| l.strip_prefix("crossing = "))
        .map(|rest| {
            let (_, v) = rest.split_once(" = ").unwrap();
            v.split(' ').next().unwrap().parse().unwrap()
        })
        .collect()
}

/// Values of `key = a, b` lines in a report.
fn values(report: &str, key: &str) -> Vec<f64> {
    report
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .filter(|(k, _)| k.trim() == key)
        .flat_map(|(_, v)| v.split(", ").filter_map(|x| x.trim().parse().ok()).collect::<Vec<f64>>())
        .collect()
}

fn with_key(base: &str, key: &str, value: &str, dir: &Path) -> PathBuf {
    let text = std::fs::read_to_string(config(base)).unwrap();
    let mut lines: Vec<String> = text
        .lines()
        .filter(|l| l.split('=').next().map(str::trim) != Some(key))
        .map(String::from)
        .collect();
    lines.push(format!("{key} = {value}"));
    let path = dir.join(format!("{key}_{value}.conf"));
    std::fs::write(&path, lines.join("\n")).unwrap();
    path
}

fn classify(cfg: &Path) -> String {
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).lines().next().unwrap().to_string()
}

#[test]
fn critical_source_voltage_example3() {
    let o = run(&["critical", "--config", config("ex3.conf").to_str().unwrap()]);
    assert!(o.status.success());
    let v = values(&stdout(&o), "critical_v_s");
    assert_eq!(v.len(), 1);
    assert!((v[0] - 17.1).abs() <= 0.2, "{v:?}");
    let (l, ls) = (values(&stdout(&o), "lvalue")[0], values(&stdout(&o), "lvalue_series")[0]);
    assert!((l - ls).abs() <= 1e-6);
}

#[test]
fn critical_duty_without_ramp() {
    let o = run(&["critical", "--config", config("cmc_no_ramp.conf").to_str().unwrap()]);
    assert!(o.status.success());
    let d = values(&stdout(&o), "critical_D");
    assert_eq!(d.len(), 1);
    assert!((d[0] - 0.5).abs() <= 1e-6);
}

#[test]
fn critical_gain_example1() {
    let o = run(&["critical", "--config", config("ex1_kp8.conf").to_str().unwrap(), "--solve-for", "k_p"]);
    assert!(o.status.success());
    let k = values(&stdout(&o), "critical_k_p");
    assert!(k.len() == 1 && (8.5..8.7).contains(&k[0]), "{k:?}");
    assert!(stdout(&o).contains("verdict = stable"));
}

#[test]
fn lplot_window_example4_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.csv");
    let o = run(&["lplot", "--config", config("ex4.conf").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let x = values(&stdout(&o), "crossings");
    assert!(x.len() == 2 && (x[0] - 0.23).abs() <= 0.02 && (x[1] - 0.47).abs() <= 0.02, "{x:?}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().next(), Some("p,D,L"));
    assert_eq!(csv.lines().count(), 52);
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "1.0000000000000001e-1");
}

#[test]
fn lplot_is_deterministic_across_thread_counts() {
    let cfg = config("ex4.conf");
    let a = bin().args(["lplot", "--config", cfg.to_str().unwrap()]).env("SUBHARMONIC_THREADS", "1").output().unwrap();
    let b = bin().args(["lplot", "--config", cfg.to_str().unwrap()]).env("SUBHARMONIC_THREADS", "4").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn contour_peak_bounded_by_pi() {
    let o = run(&["contour", "--sweep", "D:0.02:0.98:25", "--sweep", "p:0.01:20:40:log"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let max = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(max <= std::f64::consts::PI && max > 2.5, "{max}");
}

#[test]
fn window_example2() {
    let o = run(&["window", "--config", config("ex2_p049.conf").to_str().unwrap()]);
    assert!(o.status.success());
    let err = stderr(&o);
    let x = values(&err, "lplot_crossings");
    assert!(x.len() == 2 && (x[0] - 0.18).abs() <= 0.05 && (x[1] - 0.49).abs() <= 0.05, "{x:?}");
    let csv = stdout(&o);
    assert!(csv.starts_with("quantity,value\ngain_K,"));
}

#[test]
fn simulate_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(classify(&config("ex1_kp8.conf")), "period-1");
    assert_eq!(classify(&config("ex1_kp9.conf")), "period-2");
    assert_eq!(classify(&config("ex2_p049.conf")), "period-2");
    assert_eq!(classify(&config("ex2_p081.conf")), "period-1");
    assert_eq!(classify(&config("ex3.conf")), "period-2");
    assert_eq!(classify(&config("ex4.conf")), "period-1");
    assert_eq!(classify(&with_key("ex4.conf", "p", "0.6", dir.path())), "period-1");
}

#[test]
fn simulate_writes_dense_and_strobe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = run(&["simulate", "--config", config("ex4.conf").to_str().unwrap(), "--out", out.to_str().unwrap(), "--cycles", "128"]);
    assert!(o.status.success());
    let dense = std::fs::read_to_string(&out).unwrap();
    let strobe = std::fs::read_to_string(dir.path().join("trace.strobe.csv")).unwrap();
    assert_eq!(dense.lines().next(), Some("t,i_L,v_C,x_c1,x_c2,x_c3,y,h,v_d"));
    assert_eq!(strobe.lines().count(), 1 + 129);
    assert!(strobe.starts_with("cycle,t,duty,i_L,v_C,"));
}

#[test]
fn poles_sweeps() {
    let o = run(&["poles", "--config", config("ex4.conf").to_str().unwrap()]);
    assert!(o.status.success());
    let report = stderr(&o);
    let x = pole_crossings(&report);
    assert_eq!(x.len(), 2, "{report}");
    assert!((x[0] - 0.23).abs() <= 0.02 && (x[1] - 0.5).abs() <= 0.02, "{x:?}");
    assert!(stdout(&o).starts_with("p,index,re,im,modulus,error\n"));

    let o = run(&["poles", "--config", config("ex1_kp8.conf").to_str().unwrap(), "--sweep", "k_p:6:11:11"]);
    let report = stderr(&o);
    let k = pole_crossings(&report);
    assert!(k.len() == 1 && (8.55..8.75).contains(&k[0]), "{report}");

    let o = run(&["poles", "--config", config("ex4.conf").to_str().unwrap(), "--sweep", "p:0.6:0.9:4"]);
    assert!(stderr(&o).contains("crossings = none"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = with_key("ex3.conf", "colour", "blue", dir.path());
    let o = run(&["critical", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key `colour`"));

    let o = run(&["lplot", "--config", config("ex3.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "missing sweep");

    // A steep ramp keeps 𝓛 below 1 at every duty.
    let steep = with_key("ex4.conf", "v_h", "100", dir.path());
    let o = run(&["critical", "--config", steep.to_str().unwrap(), "--solve-for", "D"]);
    assert_eq!(o.status.code(), Some(3));

    // An unreachable reference winds the integrator up without bound.
    let windup = with_key("ex3.conf", "v_r", "20", dir.path());
    let out = dir.path().join("div.csv");
    let o = run(&["simulate", "--config", windup.to_str().unwrap(), "--cycles", "3000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout(&o).trim(), "diverged");
    let partial = std::fs::read_to_string(dir.path().join("div.strobe.csv")).unwrap();
    assert!(partial.lines().count() > 1000);
}
