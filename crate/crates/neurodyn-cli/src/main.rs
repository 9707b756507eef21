//! Command-line front end for the neurodyn library: run scenario files,
//! print the preset catalog, verify the pinned fixtures.
//!
//! Exit codes: 0 success, 1 runtime or check failure, 2 config parse error,
//! 3 config validation error, 4 trajectory divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod run;

use config::ConfigError;
use run::RunError;

#[derive(Parser)]
#[command(
    name = "neurodyn",
    version,
    about = "Deterministic single- and coupled-neuron simulation harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file; writes trajectory.csv, report.json and
    /// manifest.json under $NEURODYN_OUTPUT_ROOT (default: current directory)
    Simulate {
        /// TOML scenario file
        config: PathBuf,
    },
    /// Print the model preset catalog
    Presets,
    /// Re-measure the pinned quantities and compare them to the frozen
    /// fixture values
    Verify {
        /// Structural checks only: convergence order, reset exactness,
        /// zero-coupling reduction, rest-state residuals (the default)
        #[arg(long, conflicts_with_all = ["full", "regen"])]
        fast: bool,
        /// All checks, including the sweep and coupling experiments
        #[arg(long, conflicts_with = "regen")]
        full: bool,
        /// Re-measure everything and rewrite the fixture source file
        #[arg(long)]
        regen: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate { config } => simulate(&config),
        Command::Presets => {
            print!("{}", neurodyn::models::presets::catalog_text());
            0
        }
        Command::Verify { fast: _, full, regen } => verify(full, regen),
    };
    ExitCode::from(code)
}

fn simulate(path: &Path) -> u8 {
    let resolved = match config::load(path) {
        Ok(r) => r,
        Err(err @ ConfigError::Parse(_)) => {
            eprintln!("{err}");
            return 2;
        }
        Err(err @ ConfigError::Validation(_)) => {
            eprintln!("{err}");
            return 3;
        }
    };
    let root = std::env::var_os("NEURODYN_OUTPUT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    match run::execute(&resolved, &root) {
        Ok(summary) => {
            println!(
                "scenario {} (digest {}) -> {}",
                resolved.name,
                &resolved.digest[..12],
                summary.dir.display()
            );
            for line in &summary.lines {
                println!("  {line}");
            }
            0
        }
        Err(RunError::Diverged(status)) => {
            eprintln!(
                "scenario {}: {status}; partial outputs written",
                resolved.name
            );
            4
        }
        Err(RunError::Failed(msg)) => {
            eprintln!("scenario {}: {msg}", resolved.name);
            1
        }
    }
}

fn verify(full: bool, regen: bool) -> u8 {
    if regen {
        return match neurodyn::checks::regenerate_fixtures() {
            Ok(path) => {
                println!("fixtures rewritten: {}", path.display());
                println!(
                    "note: the library embeds this file at compile time; rebuild to pick up the new values"
                );
                0
            }
            Err(e) => {
                eprintln!("fixture regeneration failed: {e}");
                1
            }
        };
    }
    let outcomes = match if full {
        neurodyn::checks::run_full()
    } else {
        neurodyn::checks::run_fast()
    } {
        Ok(o) => o,
        Err(e) => {
            eprintln!("verification could not run: {e}");
            return 1;
        }
    };
    let mut failed = 0usize;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("verified {} checks: all passed", outcomes.len());
        0
    } else {
        println!("{failed} of {} checks failed", outcomes.len());
        1
    }
}
