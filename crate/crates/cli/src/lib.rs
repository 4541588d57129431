//! Command-line front end for `siet-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod units;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use crate::config::RunConfig;
pub use crate::error::CliError;
use crate::commands::Output;
use crate::config::{check_key, merge, parse_layer, Layer};

/// Name of the dumped merged configuration inside the output directory.
pub const EFFECTIVE_CONFIG: &str = "effective.conf";

#[derive(Debug, Parser)]
#[command(name = "siet", version, about = "Coverage and energy-harvesting analysis for PPP small-cell networks")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability over the T grid.
    Coverage,
    /// Energy-harvesting probability over the theta grid.
    Eeh,
    /// Monte Carlo estimates next to the analytic values.
    Montecarlo {
        /// Exit with status 4 when any estimate disagrees.
        #[arg(long)]
        strict: bool,
    },
    /// Figure data and a gnuplot script.
    Figures {
        /// Figure number: 2, 3 or 4.
        which: u8,
    },
    /// Supply-level feasibility report.
    Feasibility,
}

/// Flags that override config-file values. Lists are comma-separated;
/// powers take W, mW or uW suffixes.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Config file of `section.key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<String>,
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub trials: Option<String>,
    /// Base-station density, BS/m^2.
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Transmit power.
    #[arg(long, global = true)]
    pub power: Option<String>,
    /// Path-loss exponent (> 2).
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Noise power.
    #[arg(long, global = true)]
    pub sigma2: Option<String>,
    /// Power-splitting factor.
    #[arg(long, global = true)]
    pub rho: Option<String>,
    /// Probability the user is active.
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    /// Harvesting thresholds.
    #[arg(long, global = true)]
    pub theta: Option<String>,
    /// SINR thresholds (linear).
    #[arg(long = "T", global = true, value_name = "T")]
    pub sinr: Option<String>,
    /// Maintenance power p_m.
    #[arg(long, global = true)]
    pub pm: Option<String>,
    /// Availability factors for the feasibility report.
    #[arg(long, global = true)]
    pub zeta: Option<String>,
    /// Converter efficiencies.
    #[arg(long, global = true)]
    pub eta: Option<String>,
    /// Target harvesting probability for the feasibility report.
    #[arg(long, global = true)]
    pub target: Option<String>,
    /// Density caps lambda_max, BS/m^2.
    #[arg(long = "density-max", global = true)]
    pub density_max: Option<String>,
    #[arg(long = "power-max", global = true)]
    pub power_max: Option<String>,
    #[arg(long = "coverage-floor", global = true)]
    pub coverage_floor: Option<String>,
    /// Any config key, as KEY=VALUE (repeatable; named flags win).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Overrides {
    fn layer(&self) -> Result<Layer, CliError> {
        let mut layer = Layer::new();
        for kv in &self.set {
            let (k, val) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            check_key(k.trim())?;
            layer.insert(k.trim().to_string(), val.trim().to_string());
        }
        let named = [
            ("run.out", &self.out),
            ("run.scenario", &self.scenario),
            ("sim.seed", &self.seed),
            ("sim.trials", &self.trials),
            ("system.lambda", &self.lambda),
            ("system.power", &self.power),
            ("system.alpha", &self.alpha),
            ("system.sigma2", &self.sigma2),
            ("system.rho", &self.rho),
            ("system.epsilon", &self.epsilon),
            ("thresholds.theta", &self.theta),
            ("thresholds.T", &self.sinr),
            ("budget.pm", &self.pm),
            ("budget.zeta", &self.zeta),
            ("budget.eta", &self.eta),
            ("feasibility.target", &self.target),
            ("constraints.density_max", &self.density_max),
            ("constraints.power_max", &self.power_max),
            ("constraints.coverage_floor", &self.coverage_floor),
        ];
        for (k, val) in named {
            if let Some(val) = val {
                layer.insert(k.to_string(), val.clone());
            }
        }
        Ok(layer)
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut layers = Vec::new();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            layers.push(parse_layer(&text)?);
        }
        layers.push(self.layer()?);
        RunConfig::from_layer(&merge(&layers))
    }
}

pub fn dispatch(cfg: &RunConfig, command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Coverage => commands::cmd_coverage(cfg),
        Command::Eeh => commands::cmd_eeh(cfg),
        Command::Montecarlo { .. } => commands::cmd_montecarlo(cfg),
        Command::Figures { which } => commands::cmd_figures(cfg, *which),
        Command::Feasibility => commands::cmd_feasibility(cfg),
    }
}

/// Resolves the configuration, runs the command and writes its files plus
/// [`EFFECTIVE_CONFIG`] to the output directory.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = cli.overrides.resolve()?;
    let output = dispatch(&cfg, &cli.command)?;
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join(EFFECTIVE_CONFIG), cfg.dump())?;
    for (name, contents) in &output.files {
        fs::write(cfg.out.join(name), contents)?;
    }
    let strict = matches!(cli.command, Command::Montecarlo { strict: true });
    if strict && output.disagreements > 0 {
        print!("{}", output.stdout);
        return Err(CliError::Disagreement(output.disagreements));
    }
    Ok(output)
}
