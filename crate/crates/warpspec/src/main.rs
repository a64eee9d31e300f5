use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use warpspec::cli;
use warpspec::config::Config;

#[derive(Parser)]
#[command(name = "warpspec", version, about = "Spectral checks for warped-product ends")]
struct Args {
    /// Configuration file with `section.key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory the reports are written into.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override one configuration key (repeatable), e.g. --set end.n=2.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Shorthand for scan.modes.
    #[arg(long, global = true)]
    modes: Option<usize>,

    /// Shorthand for the trial grid, written lo:hi:step.
    #[arg(long, global = true, value_name = "LO:HI:STEP")]
    lambda_grid: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the geometric hypothesis conditions on the configured window.
    Check,
    /// Evaluate the spectral thresholds for the configured constants.
    Thresholds,
    /// Classify trial eigenvalues across cross-sectional modes.
    Scan,
    /// Run the full bound-state search pipeline on an oscillating end.
    Counterexample,
    /// Verify the weighted boundary identity, optionally with random draws.
    Identity,
}

fn build_config(args: &Args) -> warpspec::Result<Config> {
    let mut config = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for pair in &args.set {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(warpspec::Error::Config(format!(
                "--set expects KEY=VALUE, got '{pair}'"
            )));
        };
        config.set(key.trim(), value.trim())?;
    }
    if let Some(modes) = args.modes {
        config.set("scan.modes", &modes.to_string())?;
    }
    if let Some(grid) = &args.lambda_grid {
        let parts: Vec<&str> = grid.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(warpspec::Error::Config(format!(
                "--lambda-grid expects LO:HI:STEP, got '{grid}'"
            )));
        };
        config.set("scan.lambda_lo", lo)?;
        config.set("scan.lambda_hi", hi)?;
        config.set("scan.lambda_step", step)?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let subcommand = match args.command {
        Command::Check => cli::Subcommand::Check,
        Command::Thresholds => cli::Subcommand::Thresholds,
        Command::Scan => cli::Subcommand::Scan,
        Command::Counterexample => cli::Subcommand::Counterexample,
        Command::Identity => cli::Subcommand::Identity,
    };
    match build_config(&args).and_then(|config| cli::run(&config, subcommand, &args.out)) {
        Ok(outcome) => {
            println!("{}", outcome.verdict);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(2)
        }
    }
}
