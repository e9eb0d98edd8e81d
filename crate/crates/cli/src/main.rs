//! `twoway`, the command-line front end for experiments on modulo-additive
//! two-way channels.
//!
//! Exit status is 0 on success, 2 for configuration errors, 3 when a search
//! or enumeration would exceed its cap, and 1 for anything else.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twoway_core::Execution;

use commands::Format;
use config::{CommandKind, ExperimentConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Cap(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Cap(m) => write!(f, "{m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<twoway_core::Error> for CliError {
    fn from(e: twoway_core::Error) -> Self {
        match e {
            twoway_core::Error::CapExceeded { required, cap } => CliError::Cap(format!(
                "refusing to run: the request needs {required} evaluations but the cap is {cap}; \
                 shrink the blocklength or message counts, or raise the cap in the config"
            )),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "twoway",
    version,
    about = "Modulo-additive two-way channel laboratory"
)]
struct Cli {
    #[arg(value_enum)]
    command: CommandKind,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the one in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "twoway-out")]
    out: PathBuf,
    /// Worker threads; 1 runs sequentially. Output does not depend on it.
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let seed = cfg.resolve_seed(cli.seed)?;
    let files = match cli.parallel {
        Some(0) => return Err(CliError::Config("--parallel must be at least 1".into())),
        Some(1) => commands::run(cli.command, &cfg, seed, cli.format, Execution::Sequential)?,
        threads => in_pool(threads, || {
            commands::run(cli.command, &cfg, seed, cli.format, Execution::Parallel)
        })?,
    };
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", cli.out.display())))?;
    files
        .into_iter()
        .map(|(name, bytes)| {
            let path = cli.out.join(name);
            std::fs::write(&path, bytes)
                .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn in_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    let Some(n) = threads else { return f() };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?
        .install(f)
}

#[cfg(not(feature = "parallel"))]
fn in_pool<T>(
    _threads: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    f()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
