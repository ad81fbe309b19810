//! `mcloop` — datasets and verdicts for bidirectional molecular
//! communication channels.
//!
//! Subcommands: `bode` (frequency-sweep CSVs), `cutoff` (bisection search
//! for -6 dB points), `design-check` (per-condition verdicts for a target
//! control band), `simulate` (finite-difference time series) and `compare`
//! (simulated vs analytic channel gains). Configuration comes from a TOML
//! file; set `MCLOOP_LOG=info` for progress logging.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(
    name = "mcloop",
    version,
    about = "Bidirectional molecular communication channel analysis"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for datasets and reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Pass/fail bar for `compare`, dB (overrides the config value).
    #[arg(long = "tolerance-db", global = true)]
    tolerance_db: Option<f64>,

    /// Worker threads for independent simulations (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one CSV per requested transfer function over a log grid.
    Bode,
    /// Locate a crossing-gain cut-off frequency by bisection.
    Cutoff,
    /// Verify the band/membrane/self-interference/receiver conditions.
    DesignCheck,
    /// Run the finite-difference channel simulation and dump the traces.
    Simulate,
    /// Cross-validate analytic channel gains against simulations.
    Compare,
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let cfg = config::load(config_path).map_err(CliError::Config)?;

    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }

    match cli.command {
        Command::Bode => commands::cmd_bode(&cfg, &cli.out),
        Command::Cutoff => commands::cmd_cutoff(&cfg, &cli.out),
        Command::DesignCheck => commands::cmd_design_check(&cfg, &cli.out),
        Command::Simulate => commands::cmd_simulate(&cfg, &cli.out),
        Command::Compare => commands::cmd_compare(&cfg, &cli.out, cli.tolerance_db),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MCLOOP_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
