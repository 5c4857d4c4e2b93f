use std::path::PathBuf;
use std::process::ExitCode;

use bandflow::{run, Command};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bandflow", version, about = "Separable systems, stationary KdV and Hill band spectra")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "bandflow-out")]
    out: PathBuf,
    /// Worker threads for λ-grid classification.
    #[arg(long, global = true, env = "BANDFLOW_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Integrate a trajectory; write CSV and run metadata.
    Simulate,
    /// Spectral polynomial, bands and λ-grid classification.
    BandReport,
    /// Run the invariant suite; exit 1 if any check fails.
    Verify,
    /// Match the profile against `target`.
    Match,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} worker threads");
            return ExitCode::from(2);
        }
    }
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::BandReport => Command::BandReport,
        Cmd::Verify => Command::Verify,
        Cmd::Match => Command::Match,
    };
    match run(command, &config, &cli.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
