//! Command-line harness wiring data ingestion, benchmark construction,
//! comparisons, Monte Carlo validation, and table emission.

pub mod commands;
pub mod config;
pub mod sim;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use encompass_core::ErrorKind;

/// Forecast-encompassing evaluation toolkit.
#[derive(Debug, Parser)]
#[command(name = "encompass", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Output directory (overrides the config's `output.dir`).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build lagged-value benchmark forecast panels and write them as CSV.
    Forecast(CommonArgs),

    /// Run the encompassing comparisons and emit result tables.
    Compare(CommonArgs),

    /// Monte Carlo validation of the regression under known data-generating
    /// processes.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,

        /// Master seed (overrides the config's `simulate.seed`).
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
    },

    /// Re-render a machine results CSV as a fixed-width text table.
    Table {
        /// Machine results CSV produced by `compare`.
        input: PathBuf,

        /// Write the table here instead of stdout.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

/// Harness-level failures, classified for exit codes: 1 config, 2 data,
/// 3 numerical.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: encompass_core::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>, source: encompass_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core { source, .. } => match source.kind() {
                ErrorKind::Data => 2,
                ErrorKind::Numerical => 3,
            },
            CliError::Io { .. } => 2,
        }
    }
}

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Forecast(common) => {
            init_jobs(common.jobs);
            let (cfg, out) = load_config(&common)?;
            let written = commands::cmd_forecast(&cfg, &out)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Compare(common) => {
            init_jobs(common.jobs);
            let (cfg, out) = load_config(&common)?;
            let written = commands::cmd_compare(&cfg, &out)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Simulate { common, seed } => {
            init_jobs(common.jobs);
            let (cfg, out) = load_config(&common)?;
            let path = commands::cmd_simulate(&cfg, seed, &out)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Table { input, out } => {
            let rendered = commands::cmd_table(&input)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .map_err(|e| CliError::io(dir.display().to_string(), e))?;
                    let path = dir.join("results.txt");
                    std::fs::write(&path, rendered)
                        .map_err(|e| CliError::io(path.display().to_string(), e))?;
                    println!("wrote {}", path.display());
                }
                None => print!("{rendered}"),
            }
            Ok(())
        }
    }
}

fn init_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // A second call in the same process is harmless; keep that outcome.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_config(common: &CommonArgs) -> Result<(config::RunConfig, PathBuf), CliError> {
    let cfg = config::RunConfig::load(&common.config)?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| CliError::Config("no output directory (use --out or output.dir)".into()))?;
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(out.display().to_string(), e))?;
    Ok((cfg, out))
}
