//! `percolimit`: simulation, encoding and comparison driver.
//!
//! Exit codes: 0 success or pass, 1 statistical failure, 2 usage or
//! validation error, 3 I/O error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "percolimit",
    version,
    about = "Invasion percolation on trees and its scaling limits"
)]
struct Cli {
    /// Worker threads for replica-parallel commands (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// JSON object of option overrides; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one tree, envelope or limit path and write it with its manifest.
    Simulate(commands::simulate::Args),
    /// Convert between a `.pt` tree and its coding paths.
    Encode(commands::encode::Args),
    /// Run a two-sample convergence experiment.
    Compare(commands::compare::Args),
    /// Level sizes of a tree, or draws of the level limit given an envelope.
    LevelStats(commands::level_stats::Args),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// The command ran but a statistical check failed.
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<percolimit::Error> for CliError {
    fn from(e: percolimit::Error) -> Self {
        match e {
            percolimit::Error::Io(e) => CliError::Io(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut file = match &cli.config {
        Some(p) => config::read_config(p)?,
        None => serde_json::Map::new(),
    };
    let workers = match (cli.workers, file.remove("workers")) {
        (Some(w), _) => Some(w),
        (None, Some(v)) => Some(
            v.as_u64()
                .ok_or_else(|| CliError::Usage("workers: expected a positive integer".into()))? as usize,
        ),
        (None, None) => None,
    };
    if workers == Some(0) {
        return Err(CliError::Usage("workers: must be positive".into()));
    }
    let ctx = commands::Context { workers, file };
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(&ctx, a),
        Command::Encode(a) => commands::encode::run(&ctx, a),
        Command::Compare(a) => commands::compare::run(&ctx, a),
        Command::LevelStats(a) => commands::level_stats::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
