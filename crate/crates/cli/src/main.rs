//! Command-line driver: sample lattice gauge configurations, gauge-fix
//! them, and emit norm and moment-scaling CSVs. Exit codes: 0 success,
//! 2 configuration error, 3 numeric failure.

mod commands;
mod config;
mod manifest;

use clap::{Args, Parser, Subcommand};
use commands::CliError;
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "latgauge", version, about = "Lattice gauge fields on the dyadic 2-torus")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Output root; overrides the config file and LATGAUGE_OUT.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config sample count.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the Markov chains and write field snapshots.
    Sample(Common),
    /// Gauge-fix existing snapshots and write one-forms plus diagnostics.
    Gaugefix(Common),
    /// Scan growth and rho norms of the gauge-fixed one-forms.
    Norms {
        #[command(flatten)]
        common: Common,
        /// Permit the O(2^(4N)) rho scan above n1 = 7.
        #[arg(long)]
        allow_large: bool,
    },
    /// Moment-scaling statistics of loop logs and anti-development variation.
    Scaling(Common),
    /// sample, gaugefix, norms, scaling in sequence.
    All {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        allow_large: bool,
    },
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)
        .map_err(|e| CliError::Config(e.0))?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(s) = common.samples {
        cfg.samples = s;
    }
    cfg.validate().map_err(|e| CliError::Config(e.0))?;
    let root = cfg.output_root(common.output.as_deref());
    Ok((cfg, root))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Sample(c) => {
            let (cfg, root) = load(c)?;
            commands::cmd_sample(&cfg, &root)
        }
        Cmd::Gaugefix(c) => {
            let (cfg, root) = load(c)?;
            commands::cmd_gaugefix(&cfg, &root)
        }
        Cmd::Norms { common, allow_large } => {
            let (cfg, root) = load(common)?;
            commands::cmd_norms(&cfg, &root, *allow_large)
        }
        Cmd::Scaling(c) => {
            let (cfg, root) = load(c)?;
            commands::cmd_scaling(&cfg, &root)
        }
        Cmd::All { common, allow_large } => {
            let (cfg, root) = load(common)?;
            commands::cmd_all(&cfg, &root, *allow_large)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latgauge: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Numeric(_) => ExitCode::from(3),
                CliError::Io(_) => ExitCode::FAILURE,
            }
        }
    }
}
