//! Command-line front end for Taylorlet construction, verification and
//! transform-based singularity analysis.
//!
//! Exit status: 0 on success, 1 when a check or analysis fails, 2 on
//! malformed input or resource limits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::LevelFilter;
use taylorlet::symbolic::DEFAULT_DEGREE_CAP;
use taylorlet::Error;

#[derive(Parser)]
#[command(name = "taylorlet", version, about, long_about = None)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Info)]
    log_level: LogLevel,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogLevel {
    Quiet,
    Info,
    Debug,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Taylorlet of order n with 2r - 1 vanishing moments
    Construct {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check vanishing moments and restrictiveness of a stored Taylorlet
    Verify {
        path: PathBuf,
        /// Also write the results as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate |T| over a scale ladder and one shear axis; writes CSV
    Transform {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit decay exponents and compare them with the predicted ones
    Decay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the Taylor coefficients of a singularity curve
    Detect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::TrackLost { .. }
        | Error::DegenerateRow { .. }
        | Error::NonPositiveMagnitude { .. }
        | Error::QuadratureFailure { .. } => 1,
        _ => 2,
    }
}

fn degree_cap() -> Result<u64, Error> {
    match std::env::var("TAYLORLET_DEGREE_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidInput(format!(
                "TAYLORLET_DEGREE_CAP must be an integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_DEGREE_CAP),
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(Error::InvalidInput("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let cap = degree_cap()?;
    match cli.command {
        Command::Construct { n, r, out } => commands::construct(n, r, out.as_deref(), cap),
        Command::Verify { path, out } => commands::verify(&path, out.as_deref()),
        Command::Transform { config, out } => commands::transform(&config, out.as_deref(), cap),
        Command::Decay { config, out } => commands::decay(&config, out.as_deref(), cap),
        Command::Detect { config, out } => commands::detect(&config, out.as_deref(), cap),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.log_level {
        LogLevel::Quiet => LevelFilter::Off,
        LogLevel::Info => LevelFilter::Info,
        LogLevel::Debug => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
