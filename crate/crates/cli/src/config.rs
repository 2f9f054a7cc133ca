//! Run configuration: a JSON file merged with command-line overrides.
//!
//! Paths inside a config file are resolved against the file's directory;
//! paths given as flags are used as-is.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use decoherence::propagator::{DEFAULT_MC_SAMPLES, DEFAULT_QUADRATURE_TOL};
use decoherence::{EvolutionMethod, KernelParams};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliResult};

/// Sweeps larger than this need `allow_large`.
pub const MAX_SWEEP_CELLS: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Kernel,
    Evolve,
    Scenario,
    Check,
    Sweep,
}

/// A list of values or a `start:stop:count` range string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuesSpec {
    List(Vec<f64>),
    Range(String),
}

impl ValuesSpec {
    /// Number of values, without expanding a range.
    pub fn count(&self) -> CliResult<usize> {
        match self {
            ValuesSpec::List(v) => Ok(v.len()),
            ValuesSpec::Range(s) => match s.split(':').collect::<Vec<_>>().as_slice() {
                [_, _, n] => n.trim().parse().map_err(|_| invalid(format!("bad range count in {s:?}"))),
                _ => Ok(s.split(',').count()),
            },
        }
    }

    pub fn expand(&self) -> CliResult<Vec<f64>> {
        match self {
            ValuesSpec::List(v) => Ok(v.clone()),
            ValuesSpec::Range(s) => parse_values(s),
        }
    }
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_values(s: &str) -> CliResult<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(invalid("empty value list"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: {p:?}")));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("range must be start:stop:count, got {s:?}")));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| invalid(format!("bad range count in {s:?}")))?;
        return match n {
            0 => Err(invalid("range count must be positive")),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()),
        };
    }
    s.split(',').map(num).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub values: ValuesSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `kernel`, `evolve`, `osc`, `cat`, `rabi` or `epr`.
    pub target: String,
    pub reduction: String,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub allow_large: bool,
}

/// The on-disk configuration. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub scenario: Option<String>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub times: Option<ValuesSpec>,
    pub grid_units: Option<bool>,
    pub method: Option<String>,
    pub spectrum: Option<PathBuf>,
    pub rho0: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub instances: Option<usize>,
    pub params: BTreeMap<String, f64>,
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| invalid(format!("malformed config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.spectrum, &mut cfg.rho0, &mut cfg.out, &mut cfg.summary].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `over` replace those in `self`; parameters merge key by key.
    pub fn overlay(mut self, over: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(command, scenario, tau1, tau2, times, grid_units, method, spectrum, rho0, seed, samples, tol, out, summary, format, workers, instances, sweep);
        self.params.extend(over.params);
        self
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn kernel(&self) -> CliResult<KernelParams<f64>> {
        let tau1 = self.tau1.ok_or_else(|| invalid("--tau1 is required"))?;
        let tau2 = self.tau2.ok_or_else(|| invalid("--tau2 is required"))?;
        Ok(KernelParams::new(tau1, tau2)?)
    }

    /// Output times in absolute units, or `None` if none were given.
    pub fn times_opt(&self) -> CliResult<Option<Vec<f64>>> {
        let Some(spec) = &self.times else { return Ok(None) };
        let mut ts = spec.expand()?;
        if self.grid_units.unwrap_or(false) {
            let tau2 = self.tau2.ok_or_else(|| invalid("--grid-units needs --tau2"))?;
            ts.iter_mut().for_each(|t| *t *= tau2);
        }
        Ok(Some(ts))
    }

    pub fn times(&self) -> CliResult<Vec<f64>> {
        self.times_opt()?.ok_or_else(|| invalid("--times is required"))
    }

    pub fn single_time(&self) -> CliResult<f64> {
        match self.times()?.as_slice() {
            [t] => Ok(*t),
            ts => Err(invalid(format!("exactly one time expected, got {}", ts.len()))),
        }
    }

    pub fn method(&self) -> CliResult<EvolutionMethod> {
        let name = self.method.as_deref().unwrap_or("closed_form");
        let tol = self.tol.unwrap_or(DEFAULT_QUADRATURE_TOL);
        let samples = self.samples.unwrap_or(DEFAULT_MC_SAMPLES);
        Ok(EvolutionMethod::parse(name, tol, self.seed(), samples)?)
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn param_or(&self, key: &str, default: f64) -> f64 {
        self.param(key).unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> CliResult<f64> {
        self.param(key).ok_or_else(|| invalid(format!("parameter {key} is required (--param {key}=...)")))
    }

    /// A non-negative integer parameter.
    pub fn count(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.param(key) {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
            Some(v) => Err(invalid(format!("parameter {key} must be a non-negative integer, got {v}"))),
        }
    }

    /// Sets a named quantity: kernel times and `t` are fields, the rest are parameters.
    pub fn set(&mut self, key: &str, value: f64) {
        match key {
            "tau1" => self.tau1 = Some(value),
            "tau2" => self.tau2 = Some(value),
            "t" => self.times = Some(ValuesSpec::List(vec![value])),
            "seed" => self.seed = Some(value as u64),
            _ => {
                self.params.insert(key.to_string(), value);
            }
        }
    }
}

pub fn parse_param(s: &str) -> CliResult<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| invalid(format!("parameter must be key=value, got {s:?}")))?;
    let v: f64 = v.trim().parse().map_err(|_| invalid(format!("parameter {k} is not a number: {v:?}")))?;
    Ok((k.trim().to_string(), v))
}

pub fn parse_axis(s: &str) -> CliResult<Axis> {
    let (k, v) = s.split_once('=').ok_or_else(|| invalid(format!("axis must be name=values, got {s:?}")))?;
    Ok(Axis { name: k.trim().to_string(), values: ValuesSpec::Range(v.trim().to_string()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists_and_ranges() {
        assert_eq!(parse_values("1, 2.5,3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_values("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_values("2:9:1").unwrap(), vec![2.0]);
        assert!(parse_values("0:1").is_err());
        assert!(parse_values("a").is_err());
        assert!(parse_values("").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: RunConfig =
            serde_json::from_str(r#"{"tau1": 1, "tau2": 2, "params": {"g": 1, "n_photons": 2}}"#).unwrap();
        let mut flags = RunConfig { tau1: Some(0.5), ..Default::default() };
        flags.params.insert("g".into(), 3.0);
        let merged = file.overlay(flags);
        assert_eq!(merged.tau1, Some(0.5));
        assert_eq!(merged.tau2, Some(2.0));
        assert_eq!(merged.param("g"), Some(3.0));
        assert_eq!(merged.count("n_photons", 0).unwrap(), 2);
    }

    #[test]
    fn grid_units_scale_times() {
        let cfg = RunConfig {
            tau2: Some(0.5),
            times: Some(ValuesSpec::Range("1:3:3".into())),
            grid_units: Some(true),
            ..Default::default()
        };
        assert_eq!(cfg.times().unwrap(), vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"tau3": 1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"times": "0:1:3"}"#).is_ok());
        assert!(serde_json::from_str::<RunConfig>(r#"{"times": [0, 1]}"#).is_ok());
    }

    #[test]
    fn integer_parameters() {
        let mut cfg = RunConfig::default();
        cfg.set("n_photons", 2.5);
        assert!(cfg.count("n_photons", 0).is_err());
        cfg.set("n_photons", 4.0);
        assert_eq!(cfg.count("n_photons", 0).unwrap(), 4);
    }
}
