//! `iwaves`: deterministic CSV/JSON export for the internal-waves laboratory.
//!
//! Exit codes: 0 ok, 2 invalid configuration, 3 numerical or verification failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use internal_waves::Error;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "iwaves", version, about = "Internal waves in two-dimensional domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rotation numbers of the chess billiard over a list or grid of λ (CSV).
    Rotnum(Flags),
    /// Closed-form eigenfunction grids plus an index (directory of CSV files).
    Eigs(Flags),
    /// Spectral measure of a forcing and ε-sweeps around λ² (directory of CSV files).
    Specmeasure(Flags),
    /// Energy trace of the forced wave equation (CSV).
    Evolve(Flags),
    /// Right inverse of the stationary operator with a verification report (JSON).
    Rightinv(Flags),
}

#[derive(Args, Clone, Default)]
struct Flags {
    /// JSON file with any of the options below; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// disk | square | rectangle:A,B | ellipse:A11,A12,A21,A22[,V1,V2] | path to a curve JSON file.
    #[arg(long)]
    domain: Option<String>,
    /// Comma-separated λ values in (0, 1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    /// Uniform λ grid `a:b:n`.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Orbit length for rotation numbers.
    #[arg(long)]
    orbit: Option<usize>,
    /// Sine-mode cutoff on squares and rectangles.
    #[arg(long)]
    kmax: Option<u32>,
    /// Degree cutoff on disks and ellipses.
    #[arg(long)]
    nmax: Option<u32>,
    /// Points per direction of sampling grids.
    #[arg(long)]
    grid: Option<usize>,
    /// Log-spaced half-widths `a:b:n`.
    #[arg(long)]
    epsilon_sweep: Option<String>,
    /// one | bump | random (seeded polynomial).
    #[arg(long)]
    forcing: Option<String>,
    /// Final time of the evolution.
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of uniformly spaced time samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for random forcing.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed run: message and process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn numerical(message: String) -> Self {
        Self { code: 3, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed(_)
            | Error::NotClosed(_)
            | Error::ZeroSpeed { .. }
            | Error::LambdaOutOfRange(_)
            | Error::InvalidArgument(_)
            | Error::UnsupportedDomain(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(e.to_string())
    }
}

fn resolve(name: &str, flags: Flags) -> Result<RunConfig, Failure> {
    let base = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if !base.command.is_empty() && base.command != name {
        return Err(Failure::config(format!("config file is for {:?}, not {name:?}", base.command)));
    }
    let given = RunConfig {
        command: name.to_string(),
        domain: flags.domain,
        lambda: flags.lambda,
        lambda_grid: flags.lambda_grid,
        orbit: flags.orbit,
        kmax: flags.kmax,
        nmax: flags.nmax,
        grid: flags.grid,
        epsilon_sweep: flags.epsilon_sweep,
        forcing: flags.forcing,
        tmax: flags.tmax,
        samples: flags.samples,
        seed: flags.seed,
        out: flags.out,
    };
    Ok(base.overlay(&given))
}

type Runner = fn(&RunConfig) -> Result<(), Failure>;

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, flags, cmd): (&str, Flags, Runner) = match cli.command {
        Command::Rotnum(f) => ("rotnum", f, commands::rotnum),
        Command::Eigs(f) => ("eigs", f, commands::eigs),
        Command::Specmeasure(f) => ("specmeasure", f, commands::specmeasure),
        Command::Evolve(f) => ("evolve", f, commands::evolve),
        Command::Rightinv(f) => ("rightinv", f, commands::rightinv),
    };
    let cfg = resolve(name, flags)?;
    cmd(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("iwaves: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
