mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{AnalyzeArgs, ConfigFile, FormArgs, GenerateArgs, SweepArgs, UsageError};

/// Secure sensor-network clustering simulator.
#[derive(Debug, Parser)]
#[command(name = "dsn-cluster", version)]
struct Cli {
    /// TOML file with [generate], [form], [sweep] or [analyze] tables; flags
    /// given on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Place sensors uniformly and write the proximity graph
    Generate(GenerateArgs),
    /// Build a key plan, run cluster formation and write the results
    Form(FormArgs),
    /// Compare dominator counts against the greedy baselines over many seeds
    Sweep(SweepArgs),
    /// Closed-form curves, the comparison sweeps and their plots
    Analyze(AnalyzeArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(a) => commands::generate(a.resolve(&file)?),
        Command::Form(a) => commands::form(a.resolve(&file)?),
        Command::Sweep(a) => commands::sweep(a.resolve(&file)?),
        Command::Analyze(a) => commands::analyze(a.resolve(&file)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
