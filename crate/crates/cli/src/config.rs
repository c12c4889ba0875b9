//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use subharmonic_core::{BuckParams, ControlScheme, DutyCycle, DutySpec, SolveFor, Sweep, SweepVariable};

/// Problem with the configuration or command line. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

const PARAM_KEYS: &[&str] = &["v_s", "v_r", "v_l", "v_h", "m_a", "f_s", "l", "c", "r", "r_c"];
const OPTION_KEYS: &[&str] = &["scheme", "duty", "sweep", "cycles", "terms", "out", "solve_for"];

fn scheme_keys(scheme: &str) -> Option<&'static [&'static str]> {
    Some(match scheme {
        "cmc" => &[],
        "pvmc" | "cfpvr" | "rlp" => &["k_p"],
        "acmc" => &["r_s", "k_c", "z_c", "omega_p", "p"],
        "vmc3" => &["k_c", "kappa_z", "omega_p", "p"],
        _ => return None,
    })
}

/// Parsed `var:start:stop:n[:log]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
    pub log: bool,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        if !(parts.len() == 4 || parts.len() == 5) {
            return err(format!("sweep `{text}` is not var:start:stop:n[:log]"));
        }
        let variable = parts[0].parse().map_err(|e| ConfigError(format!("sweep: {e}")))?;
        let start = number("sweep start", parts[1])?;
        let stop = number("sweep stop", parts[2])?;
        let n = parts[3]
            .parse()
            .map_err(|_| ConfigError(format!("sweep count `{}` is not a positive integer", parts[3])))?;
        let log = match parts.get(4) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(other) => return err(format!("sweep spacing `{other}` is neither lin nor log")),
        };
        Ok(SweepSpec { variable, start, stop, n, log })
    }

    pub fn build(&self) -> Result<Sweep, ConfigError> {
        let s = if self.log {
            Sweep::log(self.variable, self.start, self.stop, self.n)
        } else {
            Sweep::linear(self.variable, self.start, self.stop, self.n)
        };
        s.map_err(|e| ConfigError(format!("sweep: {e}")))
    }
}

fn number(key: &str, text: &str) -> Result<f64, ConfigError> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(format!("`{key}`: `{text}` is not a finite number")),
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: BuckParams,
    pub scheme: ControlScheme,
    pub duty: DutySpec,
    pub sweep: Option<SweepSpec>,
    pub cycles: Option<usize>,
    pub terms: Option<usize>,
    pub out: Option<PathBuf>,
    pub solve_for: Option<SolveFor>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // Relative output paths in a config file are relative to the file.
        if let (Some(out), Some(dir)) = (&cfg.out, path.parent()) {
            if out.is_relative() {
                cfg.out = Some(dir.join(out));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", i + 1));
            };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if v.is_empty() {
                return err(format!("line {}: `{k}` has no value", i + 1));
            }
            if entries.insert(k.clone(), v).is_some() {
                return err(format!("line {}: `{k}` given twice", i + 1));
            }
        }

        let scheme_name = entries.get("scheme").cloned().ok_or_else(|| ConfigError("missing key `scheme`".into()))?;
        let Some(gain_keys) = scheme_keys(&scheme_name) else {
            return err(format!("unknown scheme `{scheme_name}` (cmc, pvmc, cfpvr, acmc, vmc3, rlp)"));
        };
        for k in entries.keys() {
            let k = k.as_str();
            if !(PARAM_KEYS.contains(&k) || OPTION_KEYS.contains(&k) || gain_keys.contains(&k)) {
                let known_elsewhere = ["k_p", "r_s", "k_c", "z_c", "omega_p", "p", "kappa_z"].contains(&k);
                return if known_elsewhere {
                    err(format!("key `{k}` does not apply to scheme {scheme_name}"))
                } else {
                    err(format!("unknown key `{k}`"))
                };
            }
        }

        let get = |k: &str| entries.get(k).map(|v| number(k, v)).transpose();
        let need = |k: &str| get(k)?.ok_or_else(|| ConfigError(format!("missing key `{k}`")));

        let f_s = need("f_s")?;
        let v_l = get("v_l")?.unwrap_or(0.0);
        let v_h = match (get("v_h")?, get("m_a")?) {
            (Some(_), Some(_)) => return err("give either `v_h` or `m_a`, not both"),
            (Some(v), None) => v,
            (None, Some(m)) => v_l + m / f_s,
            (None, None) => return err("missing key `v_h` (or `m_a`)"),
        };
        let params = BuckParams {
            v_s: need("v_s")?,
            v_r: need("v_r")?,
            v_l,
            v_h,
            f_s,
            l: need("l")?,
            c: get("c")?,
            r: need("r")?,
            r_c: get("r_c")?.unwrap_or(0.0),
        };
        params.validate().map_err(|e| ConfigError(e.to_string()))?;

        let omega_p = || -> Result<f64, ConfigError> {
            match (get("omega_p")?, get("p")?) {
                (Some(_), Some(_)) => err("give either `omega_p` or `p`, not both"),
                (Some(w), None) => Ok(w),
                (None, Some(p)) => Ok(p * params.omega_s()),
                (None, None) => err("missing key `omega_p` (or `p`)"),
            }
        };
        let scheme = match scheme_name.as_str() {
            "cmc" => ControlScheme::Cmc,
            "pvmc" => ControlScheme::Pvmc { k_p: need("k_p")? },
            "cfpvr" => ControlScheme::Cfpvr { k_p: need("k_p")? },
            "rlp" => ControlScheme::Rlp { k_p: need("k_p")? },
            "acmc" => ControlScheme::Acmc {
                r_s: need("r_s")?,
                k_c: need("k_c")?,
                z_c: need("z_c")?,
                omega_p: omega_p()?,
            },
            "vmc3" => ControlScheme::Vmc3 {
                k_c: need("k_c")?,
                kappa_z: need("kappa_z")?,
                omega_p: omega_p()?,
            },
            _ => unreachable!(),
        };
        scheme.validate().map_err(|e| ConfigError(e.to_string()))?;
        if scheme.needs_capacitor() && params.c.is_none() {
            return err(format!("scheme {scheme} needs key `c`"));
        }

        let duty = match get("duty")? {
            Some(d) => DutySpec::Fixed(DutyCycle::new(d).map_err(|e| ConfigError(format!("`duty`: {e}")))?),
            None => DutySpec::Nominal,
        };
        let count = |k: &str| -> Result<Option<usize>, ConfigError> {
            entries
                .get(k)
                .map(|v| v.parse::<usize>().map_err(|_| ConfigError(format!("`{k}`: `{v}` is not a non-negative integer"))))
                .transpose()
        };
        Ok(RunConfig {
            params,
            scheme,
            duty,
            sweep: entries.get("sweep").map(|s| SweepSpec::parse(s)).transpose()?,
            cycles: count("cycles")?,
            terms: count("terms")?,
            out: entries.get("out").map(PathBuf::from),
            solve_for: entries
                .get("solve_for")
                .map(|s| s.parse().map_err(|e| ConfigError(format!("`solve_for`: {e}"))))
                .transpose()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX3: &str = "
        scheme = vmc3   # type III
        v_s = 16
        v_r = 3.3
        v_h = 1.5
        f_s = 300e3
        l = 900e-9
        c = 990e-6
        r = 0.4
        r_c = 5e-3
        k_c = 7.78e4
        kappa_z = 0.5
        p = 0.5
        duty = 0.2
    ";

    #[test]
    fn parses_example() {
        let c = RunConfig::parse(EX3).unwrap();
        assert_eq!(c.params.v_l, 0.0);
        assert!(matches!(c.scheme, ControlScheme::Vmc3 { kappa_z, .. } if kappa_z == 0.5));
        assert!((c.scheme.pole_ratio(&c.params).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(c.duty, DutySpec::Fixed(d) if d.get() == 0.2));
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        let e = RunConfig::parse(&format!("{EX3}\nfoo = 1")).unwrap_err();
        assert!(e.0.contains("unknown key `foo`"));
        let e = RunConfig::parse(&format!("{EX3}\nk_p = 1")).unwrap_err();
        assert!(e.0.contains("does not apply"));
        let e = RunConfig::parse(&format!("{EX3}\nv_s = 1")).unwrap_err();
        assert!(e.0.contains("twice"));
    }

    #[test]
    fn missing_keys_reported() {
        let e = RunConfig::parse(&EX3.replace("c = 990e-6", "")).unwrap_err();
        assert!(e.0.contains("needs key `c`"), "{e}");
        let e = RunConfig::parse(&EX3.replace("l = 900e-9", "")).unwrap_err();
        assert!(e.0.contains("`l`"));
    }

    #[test]
    fn ramp_slope_sets_v_h() {
        let text = EX3.replace("v_h = 1.5", "m_a = 3e5");
        let c = RunConfig::parse(&text).unwrap();
        assert!((c.params.v_h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_spec() {
        let s = SweepSpec::parse("p:0.1:0.6:51").unwrap();
        assert_eq!((s.variable, s.n, s.log), (SweepVariable::PoleRatio, 51, false));
        assert!(SweepSpec::parse("k_p:1:20:40:log").unwrap().log);
        assert!(SweepSpec::parse("p:0.1:0.6").is_err());
        assert!(SweepSpec::parse("q:0.1:0.6:3").is_err());
        assert!(SweepSpec::parse("p:0.1:0.6:3:cubic").is_err());
    }
}
