//! Command-line front end: single spectra, parameter sweeps, equal-time
//! correlation probes, backaction reports, and oracle certification.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::CliError;
use config::{OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "qprobe",
    version,
    about = "Resonator spectroscopy of a transverse-field Ising chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a single configuration key (repeatable), e.g. --set hx_over_2j=0.2.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output path (defaults to <mode>.<format> in the working directory).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Concurrent sweep workers.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute C(omega) for one parameter point.
    Spectrum,
    /// Sweep one parameter and collect spectra, gaps, and peaks.
    Sweep,
    /// Equal-time correlation readout C(t = 0).
    EqualTime,
    /// Backaction self-consistency report.
    Backaction,
    /// Certify closed-form densities against exact diagonalization (N <= 6).
    Certify,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| CliError::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    config
        .apply_overrides(&cli.set)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    let (errors, warnings) = config::validate(&config);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if !errors.is_empty() {
        return Err(CliError::Config(errors.join("; ")));
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let format = match cli.format {
        Some(FormatArg::Csv) | None => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
    };
    let default_name = |stem: &str| PathBuf::from(format!("{stem}.{}", format.extension()));
    match cli.command {
        Command::Spectrum => {
            let out = cli.output.clone().unwrap_or_else(|| default_name("spectrum"));
            commands::run_spectrum(&config, &out, format)
        }
        Command::Sweep => {
            let out = cli.output.clone().unwrap_or_else(|| default_name("sweep"));
            commands::run_sweep(&config, &out, format)
        }
        Command::EqualTime => {
            let out = cli
                .output
                .clone()
                .unwrap_or_else(|| default_name("equal_time"));
            commands::run_equal_time(&config, &out, format)
        }
        Command::Backaction => {
            let out = cli
                .output
                .clone()
                .unwrap_or_else(|| default_name("backaction"));
            commands::run_backaction(&config, &out, format)
        }
        Command::Certify => commands::run_certify(&config, cli.output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
