//! Commands behind the `bandflow` binary. Every reported number comes
//! from a `bandflow_core` call; this crate only reads configs and writes
//! CSV and JSON.

pub mod band;
pub mod config;
mod error;
pub mod matching;
mod output;
pub mod simulate;
pub mod verify;

use std::path::Path;

pub use error::CliError;

use config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    BandReport,
    Verify,
    Match,
}

/// Loads the config, runs the command and prints a short summary.
pub fn run(command: Command, config: &Path, out: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    match command {
        Command::Simulate => {
            let s = simulate::simulate(&cfg, out)?;
            println!("{} samples, max |drift| {:e}", s.samples, s.max_drift);
            println!("wrote {}", s.trajectory.display());
            println!("wrote {}", s.metadata.display());
        }
        Command::BandReport => {
            let b = band::band_report(&cfg, out)?;
            println!("status {}", b.report["status"]);
            if let Some(summary) = b.report["classification"].get("summary") {
                println!("classification {summary}");
            }
            println!("wrote {}", b.path.display());
        }
        Command::Verify => {
            let v = verify::verify(&cfg, out)?;
            for c in &v.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {:e} (threshold {:e}) {}", c.name, c.value, c.threshold, c.detail);
            }
            println!("wrote {}", v.path.display());
            let failed = v.failed();
            if !failed.is_empty() {
                return Err(CliError::VerifyFailed(failed));
            }
        }
        Command::Match => {
            let m = matching::match_cmd(&cfg, out)?;
            println!("result {}", m.report["result"]);
            println!("wrote {}", m.path.display());
        }
    }
    Ok(())
}
