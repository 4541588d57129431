//! Run configuration: flat `section.key = value` text, merged as
//! defaults < config file < flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use siet_core::feasibility::{format_value, EnergyBudget, FeasibilityConstraints};
use siet_core::montecarlo::SimConfig;
use siet_core::SystemParams;

use crate::error::CliError;
use crate::units::{parse_bool, parse_count, parse_list, parse_power, parse_real};

/// Every accepted key with its default, in dump order.
pub const KEYS: &[(&str, &str)] = &[
    ("run.scenario", "default"),
    ("run.out", "siet-out"),
    ("system.lambda", "0.01"),
    ("system.power", "1"),
    ("system.alpha", "4"),
    ("system.sigma2", "0"),
    ("system.rho", "0.1"),
    ("system.epsilon", "0.3"),
    ("thresholds.T", "1"),
    ("thresholds.theta", "1mW"),
    ("budget.pm", "0.02"),
    ("budget.zeta", ""),
    ("budget.eta", "0.3,0.6"),
    ("sim.trials", "100000"),
    ("sim.seed", "1"),
    ("sim.window_radius", "auto"),
    ("sim.tail_tolerance", "auto"),
    ("sim.compensate_tail", "true"),
    ("constraints.coverage_floor", "0.5"),
    ("constraints.power_max", "1"),
    ("constraints.density_max", "0.0001,0.01"),
    ("feasibility.target", "0.5"),
    ("figures.rho", "0.1,0.5,0.9"),
    ("figures.targets", "0.5,0.8,0.9"),
    ("figures.zeta_min", "0.01"),
    ("figures.zeta_max", "2"),
    ("figures.zeta_points", "61"),
    ("figures.lambda_sqrt_p_max", "0.03"),
    ("figures.lambda_sqrt_p_points", "61"),
];

/// Raw key/value layer.
pub type Layer = BTreeMap<String, String>;

/// Parses config text. `#` starts a comment; blank lines are ignored.
pub fn parse_layer(text: &str) -> Result<Layer, CliError> {
    let mut layer = Layer::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
        let key = key.trim();
        check_key(key)?;
        layer.insert(key.to_string(), value.trim().to_string());
    }
    Ok(layer)
}

pub fn check_key(key: &str) -> Result<(), CliError> {
    if KEYS.iter().any(|(k, _)| *k == key) {
        Ok(())
    } else {
        Err(CliError::Config(format!("unknown key {key:?}")))
    }
}

/// Applies layers in order; later layers win.
pub fn merge(layers: &[Layer]) -> Layer {
    let mut merged: Layer = KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    for layer in layers {
        for (k, v) in layer {
            merged.insert(k.clone(), v.clone());
        }
    }
    merged
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub out: PathBuf,
    pub system: SystemParams,
    pub sinr_thresholds: Vec<f64>,
    /// Θ values, W.
    pub eeh_thresholds: Vec<f64>,
    pub maintenance_power: f64,
    /// Explicit availability factors for the feasibility report.
    pub zetas: Vec<f64>,
    pub etas: Vec<f64>,
    pub sim: SimConfig,
    pub coverage_floor: f64,
    pub power_max: f64,
    pub density_max: Vec<f64>,
    pub feasibility_target: f64,
    pub fig_rhos: Vec<f64>,
    pub fig_targets: Vec<f64>,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub zeta_points: usize,
    pub lambda_sqrt_p_max: f64,
    pub lambda_sqrt_p_points: usize,
}

fn get<'a>(layer: &'a Layer, key: &str) -> &'a str {
    layer.get(key).map(String::as_str).unwrap_or("")
}

fn keyed<T>(key: &str, r: Result<T, CliError>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{key}: {m}")),
        other => other,
    })
}

fn optional_real(text: &str) -> Result<Option<f64>, CliError> {
    match text.trim() {
        "" | "auto" => Ok(None),
        t => parse_real(t).map(Some),
    }
}

impl RunConfig {
    /// Builds and validates the typed configuration from a merged layer.
    pub fn from_layer(layer: &Layer) -> Result<Self, CliError> {
        let real = |k: &str| keyed(k, parse_real(get(layer, k)));
        let power = |k: &str| keyed(k, parse_power(get(layer, k)));
        let reals = |k: &str| keyed(k, parse_list(get(layer, k), parse_real));
        let count = |k: &str| keyed(k, parse_count(get(layer, k)));

        let system = SystemParams {
            lambda: real("system.lambda")?,
            power: power("system.power")?,
            alpha: real("system.alpha")?,
            noise: power("system.sigma2")?,
            rho: real("system.rho")?,
            epsilon: real("system.epsilon")?,
        };
        let sim = SimConfig {
            trials: count("sim.trials")?,
            seed: count("sim.seed")?,
            window_radius: keyed("sim.window_radius", optional_real(get(layer, "sim.window_radius")))?,
            tail_tolerance: keyed(
                "sim.tail_tolerance",
                match get(layer, "sim.tail_tolerance").trim() {
                    "" | "auto" => Ok(None),
                    t => parse_power(t).map(Some),
                },
            )?,
            compensate_tail: keyed("sim.compensate_tail", parse_bool(get(layer, "sim.compensate_tail")))?,
        };
        let cfg = RunConfig {
            scenario: get(layer, "run.scenario").to_string(),
            out: PathBuf::from(get(layer, "run.out")),
            system,
            sinr_thresholds: reals("thresholds.T")?,
            eeh_thresholds: keyed("thresholds.theta", parse_list(get(layer, "thresholds.theta"), parse_power))?,
            maintenance_power: power("budget.pm")?,
            zetas: reals("budget.zeta")?,
            etas: reals("budget.eta")?,
            sim,
            coverage_floor: real("constraints.coverage_floor")?,
            power_max: power("constraints.power_max")?,
            density_max: reals("constraints.density_max")?,
            feasibility_target: real("feasibility.target")?,
            fig_rhos: reals("figures.rho")?,
            fig_targets: reals("figures.targets")?,
            zeta_min: real("figures.zeta_min")?,
            zeta_max: real("figures.zeta_max")?,
            zeta_points: count("figures.zeta_points")? as usize,
            lambda_sqrt_p_max: real("figures.lambda_sqrt_p_max")?,
            lambda_sqrt_p_points: count("figures.lambda_sqrt_p_points")? as usize,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.system.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.sim.validate()?;
        if self.scenario.contains([',', '\n']) || self.scenario.is_empty() {
            return Err(CliError::Config("run.scenario must be nonempty text without commas".into()));
        }
        if self.out.as_os_str().is_empty() {
            return Err(CliError::Config("run.out is empty".into()));
        }
        if let Some(t) = self.sinr_thresholds.iter().find(|t| !(**t >= 0.0)) {
            return Err(CliError::Config(format!("thresholds.T: negative threshold {t}")));
        }
        if let Some(t) = self.eeh_thresholds.iter().find(|t| !(**t > 0.0)) {
            return Err(CliError::Config(format!("thresholds.theta: threshold must be positive (got {t})")));
        }
        for &eta in &self.etas {
            EnergyBudget::new(self.maintenance_power, 1.0, eta)?;
        }
        for &z in &self.zetas {
            EnergyBudget::new(self.maintenance_power, z, 1.0)?;
        }
        for &d in &self.density_max {
            FeasibilityConstraints::new(self.coverage_floor, self.power_max, d)?;
        }
        FeasibilityConstraints::new(self.coverage_floor, self.power_max, 1.0)?;
        for &t in self.fig_targets.iter().chain([self.feasibility_target].iter()) {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Config(format!("target probability out of (0,1): {t}")));
            }
        }
        if let Some(r) = self.fig_rhos.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(CliError::Config(format!("figures.rho: {r} out of [0,1]")));
        }
        if !(self.zeta_min > 0.0 && self.zeta_max > self.zeta_min) || self.zeta_points < 2 {
            return Err(CliError::Config("figures.zeta_*: need 0 < zeta_min < zeta_max and at least 2 points".into()));
        }
        if !(self.lambda_sqrt_p_max > 0.0) || self.lambda_sqrt_p_points < 2 {
            return Err(CliError::Config("figures.lambda_sqrt_p_*: need a positive maximum and at least 2 points".into()));
        }
        Ok(())
    }

    /// Canonical `key = value` text that parses back to this configuration.
    pub fn dump(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format_value(*x)).collect::<Vec<_>>().join(",");
        let opt = |v: Option<f64>| v.map(format_value).unwrap_or_else(|| "auto".into());
        let s = &self.system;
        let values: Vec<(&str, String)> = vec![
            ("run.scenario", self.scenario.clone()),
            ("run.out", self.out.display().to_string()),
            ("system.lambda", format_value(s.lambda)),
            ("system.power", format_value(s.power)),
            ("system.alpha", format_value(s.alpha)),
            ("system.sigma2", format_value(s.noise)),
            ("system.rho", format_value(s.rho)),
            ("system.epsilon", format_value(s.epsilon)),
            ("thresholds.T", list(&self.sinr_thresholds)),
            ("thresholds.theta", list(&self.eeh_thresholds)),
            ("budget.pm", format_value(self.maintenance_power)),
            ("budget.zeta", list(&self.zetas)),
            ("budget.eta", list(&self.etas)),
            ("sim.trials", self.sim.trials.to_string()),
            ("sim.seed", self.sim.seed.to_string()),
            ("sim.window_radius", opt(self.sim.window_radius)),
            ("sim.tail_tolerance", opt(self.sim.tail_tolerance)),
            ("sim.compensate_tail", self.sim.compensate_tail.to_string()),
            ("constraints.coverage_floor", format_value(self.coverage_floor)),
            ("constraints.power_max", format_value(self.power_max)),
            ("constraints.density_max", list(&self.density_max)),
            ("feasibility.target", format_value(self.feasibility_target)),
            ("figures.rho", list(&self.fig_rhos)),
            ("figures.targets", list(&self.fig_targets)),
            ("figures.zeta_min", format_value(self.zeta_min)),
            ("figures.zeta_max", format_value(self.zeta_max)),
            ("figures.zeta_points", self.zeta_points.to_string()),
            ("figures.lambda_sqrt_p_max", format_value(self.lambda_sqrt_p_max)),
            ("figures.lambda_sqrt_p_points", self.lambda_sqrt_p_points.to_string()),
        ];
        debug_assert_eq!(values.len(), KEYS.len());
        let mut out = String::from("# effective configuration; powers in W\n");
        for (k, v) in values {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_layer(&merge(&[])).expect("defaults are valid")
    }
}
