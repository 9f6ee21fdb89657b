//! `diskstat`: exact and asymptotic disk-counting statistics from the command line.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, SharedArgs};

#[derive(Debug, Parser)]
#[command(
    name = "diskstat",
    version,
    about = "Disk counting statistics of the Mittag-Leffler ensemble"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact log-MGF of the disk counts over an n-grid.
    Mgf(SharedArgs),
    /// Coefficients C1..C4 of the large-n expansion of the log-MGF.
    Coeffs(SharedArgs),
    /// Exact log-MGF against the four-term expansion, with the fitted decay rate.
    Converge(SharedArgs),
    /// Monte Carlo moments against exact and asymptotic values.
    Sample(SharedArgs),
    /// Closed-form moment expansions and the limiting correlation matrix.
    Moments(SharedArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl From<diskstat_core::Error> for CliError {
    fn from(e: diskstat_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

type Handler = fn(&RunConfig) -> Result<output::Table, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, args, cmd): (&str, &SharedArgs, Handler) = match &cli.command {
        Command::Mgf(a) => ("mgf", a, commands::mgf),
        Command::Coeffs(a) => ("coeffs", a, commands::coeffs),
        Command::Converge(a) => ("converge", a, commands::converge),
        Command::Sample(a) => ("sample", a, commands::sample),
        Command::Moments(a) => ("moments", a, commands::moments),
    };
    let cfg = RunConfig::resolve(args, name)?;
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    }
    let text = cmd(&cfg)?.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("invalid `out`: cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Numerical(format!("writing output: {e}"))),
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
