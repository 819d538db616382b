//! `bpi` — biphoton plasma interferometry from the command line.
//!
//! Every subcommand reads one strict TOML configuration (`--config`), runs
//! the corresponding model, and emits CSV or JSON (`--format`) to stdout or
//! `--out`. All randomness flows from a single seed (`--seed` overrides the
//! configured one), and identical configuration + seed gives bit-identical
//! output.
//!
//! Exit codes: 0 success; 1 invocation, configuration, or input validation
//! failure; 2 numerical failure (non-convergence, no dip, degenerate fit);
//! 3 one or more `paper-report` checks out of tolerance.

mod config;
mod emit;
mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Comma-separated values with a fixed header per table kind.
    Csv,
    /// A single JSON document with the full result structures.
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "bpi",
    version,
    about = "Biphoton plasma interferometry: dispersion tables, coincidence dips, \
             Monte Carlo scans, fits, and sensitivity limits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Master RNG seed; overrides the seed in the configuration.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output file; stdout when omitted (and no [outputs] override).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format; `csv` when omitted (and no [outputs] override).
    #[arg(long, global = true, value_enum, value_name = "csv|json")]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refractive-index term breakdown per species, with the
    /// correction-ratio table.
    Dispersion,
    /// Chord-integrated plasma phases and group delays for the configured
    /// path layout.
    Phase,
    /// Closed-form steady coincidence-dip curve over the scan grid.
    Dip,
    /// Dip curve at one accumulation time under linearly growing density.
    #[command(name = "lg-dip")]
    LgDip,
    /// Monte Carlo dip scan: noisy normalized curve plus a fit report.
    Mc,
    /// Fit the dip model to a previously emitted dip-curve CSV.
    Fit,
    /// Dip-center precision versus pair budget.
    Scaling,
    /// Phase, delay, and length sensitivity limits.
    Sensitivity,
    /// Recompute every reference-scenario number and grade it.
    #[command(name = "paper-report")]
    PaperReport,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successes; anything else is an
            // invocation validation failure.
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return code;
        }
    };
    match run::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
