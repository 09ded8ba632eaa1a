//! Command-line front end. Parses arguments, loads job configurations,
//! delegates all mathematics to the core crate and prints reports in
//! aligned text or stable JSON.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage, config or
//! internal error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::CliError;
use crate::report::Report;

#[derive(Parser)]
#[command(
    name = "hilbtaut",
    version,
    about = "Slope, stability, cohomology and deformation reports for induced sheaves on Hilbert schemes of surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-derive every frozen constant through independent routes
    Verify {
        /// Print the report as JSON instead of aligned text
        #[arg(long)]
        json: bool,
    },
    /// Slope of the induced sheaf against the configured polarisation
    Slope {
        /// Job configuration file (JSON)
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Stability verdict plus an exhaustive destabiliser search
    Stability {
        /// Job configuration file (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Coefficient box bound for the candidate search
        #[arg(long, default_value_t = 50)]
        search_bound: i64,
        #[arg(long)]
        json: bool,
    },
    /// Cohomology and self-extension dimensions of the induced sheaf
    Cohomology {
        /// Job configuration file (JSON)
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Deformation ledger of the point-ideal twist family at level k
    Deform {
        /// Number of fibres in the underlying bundle, at least 2
        #[arg(long)]
        k: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate an intersection expression in an oracle ring
    Eval {
        /// Ring selector: A2, A3 or Xn:<factors>,<gram JSON>
        #[arg(long)]
        ring: String,
        /// Expression to evaluate
        #[arg(long)]
        expr: String,
        #[arg(long)]
        json: bool,
    },
}

fn run(command: &Command) -> Result<(Report, i32), CliError> {
    match command {
        Command::Verify { .. } => commands::cmd_verify(),
        Command::Slope { config, .. } => commands::cmd_slope(config),
        Command::Stability {
            config,
            search_bound,
            ..
        } => commands::cmd_stability(config, *search_bound),
        Command::Cohomology { config, .. } => commands::cmd_cohomology(config),
        Command::Deform { k, .. } => commands::cmd_deform(*k),
        Command::Eval { ring, expr, .. } => commands::cmd_eval(ring, expr),
    }
}

fn wants_json(command: &Command) -> bool {
    match command {
        Command::Verify { json }
        | Command::Slope { json, .. }
        | Command::Stability { json, .. }
        | Command::Cohomology { json, .. }
        | Command::Deform { json, .. }
        | Command::Eval { json, .. } => *json,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((report, code)) => {
            let code = if code == 0 && !report.passed() { 1 } else { code };
            print!(
                "{}",
                if wants_json(&cli.command) {
                    report.to_json()
                } else {
                    report.to_text()
                }
            );
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
