//! Experiment driver for the prefchoice simulator: analytic curves, replicated
//! simulations, theory-vs-simulation comparison and exponent sweeps, written as
//! CSV and JSON artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "prefchoice", version, about = "Preferential attachment with location-based choice")]
pub struct Cli {
    /// Experiment config (flat TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the config replica count.
    #[arg(long, global = true)]
    pub replicas: Option<usize>,
    /// Worker threads for replicas and sweep points.
    #[arg(long, global = true, env = "PREFCHOICE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic curves: f, phase, Psi, degree kernel, mu_k.
    Analyze,
    /// Grow every replica and write its snapshots.
    Simulate,
    /// Compare the analyze and simulate outputs in the output directory.
    Compare,
    /// Simulate and fit the degree exponent for a list of alpha values.
    Sweep {
        /// Comma-separated alphas; defaults to `sweep_alphas` from the config.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<f64>>,
    },
}

pub fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.params.seed = seed;
    }
    if let Some(replicas) = cli.replicas {
        config.replicas = replicas;
    }
    config.validate()?;
    Ok(config)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let config = load_config(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = cli.threads {
        pool = pool.num_threads(threads);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {:?} threads: {e}", cli.threads)))?;
    pool.install(|| match &cli.command {
        Command::Analyze => commands::analyze(&config, &cli.out),
        Command::Simulate => commands::simulate(&config, &cli.out),
        Command::Compare => commands::compare(&config, &cli.out),
        Command::Sweep { alphas } => {
            let alphas = alphas.as_deref().unwrap_or(&config.sweep_alphas);
            commands::sweep(&config, alphas, &cli.out)
        }
    })
}
