//! `lrmon`: reproducible runs over the lrmon-core modules.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lrmon_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::NonConvergence { .. } | Error::NormDrift(_) | Error::InsufficientTrajectories { .. } => 3,
                Error::Resource(_) => 4,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lrmon", version, about = "Long-range monitored circuit experiments")]
struct Cli {
    /// root directory for run outputs
    #[arg(long, global = true, default_value = "runs")]
    output_dir: PathBuf,
    /// worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean-field phase, order parameter and exponents over an (alpha, gamma) grid
    PhaseDiagram(commands::PhaseDiagramArgs),
    /// Effective interaction table from numerical inversion of the coupling kernel
    Couplings(commands::CouplingsArgs),
    /// Lattice quasi-entropy sweep and scaling fit
    EntropyFit(commands::EntropyFitArgs),
    /// SYK chain saddle: lambda, stiffness and transition order
    Syk(commands::SykArgs),
    /// Brownian circuit Monte Carlo over a gamma sweep
    Mc(commands::McArgs),
    /// Closed-form entropy curves, mutual information and code distance
    Code(commands::CodeArgs),
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let run = match cli.command {
        Command::PhaseDiagram(a) => commands::phase_diagram(&a)?,
        Command::Couplings(a) => commands::couplings(&a)?,
        Command::EntropyFit(a) => commands::entropy_fit(&a)?,
        Command::Syk(a) => commands::syk(&a)?,
        Command::Mc(a) => commands::mc(&a)?,
        Command::Code(a) => commands::code(&a)?,
    };
    run.commit(&cli.output_dir)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
