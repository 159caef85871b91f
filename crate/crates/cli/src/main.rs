//! `wfsim` command-line front end.
//!
//! Exit codes: 0 success, 1 a shielded-ensemble bound was violated, 2 invalid input,
//! 3 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(name = "wfsim", version, about = "Wigner's-friend entanglement and key-security simulator")]
struct Cli {
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Seed for every random draw (required by `theorem1`)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Slack for the shielded-ensemble bound checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file
    Simulate { scenario: PathBuf },
    /// Sweep one scenario parameter over a grid
    Sweep {
        scenario: PathBuf,
        /// `p`, `epsilon` or `channel.strength` as name=start:stop:step
        #[arg(long)]
        param: String,
    },
    /// Check the assisted-entanglement bounds on random shielded ensembles
    Theorem1 {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Pair and shield dimensions as x,y,z
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        /// Ensemble size
        #[arg(long, default_value_t = 2)]
        members: usize,
        /// mixed, pure, disjoint or all (cycled per trial)
        #[arg(long, default_value = "all")]
        family: String,
    },
    /// Compare trace distance, Helstrom and an optional POVM on two states
    Discriminate {
        tau: PathBuf,
        upsilon: PathBuf,
        #[arg(long)]
        povm: Option<PathBuf>,
    },
}

/// An exit code with its message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<wfsim::Error> for Failure {
    fn from(e: wfsim::Error) -> Self {
        Self {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
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
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Simulate { scenario } => commands::simulate(scenario, out, cli.format),
        Command::Sweep { scenario, param } => commands::sweep(scenario, param, out, cli.format),
        Command::Theorem1 { trials, dims, members, family } => commands::theorem1(
            &commands::Theorem1Args {
                seed: cli.seed,
                trials: *trials,
                dims,
                members: *members,
                family,
                tolerance: cli.tolerance,
            },
            out,
            cli.format,
        ),
        Command::Discriminate { tau, upsilon, povm } => {
            commands::discriminate(tau, upsilon, povm.as_deref(), out, cli.format)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wfsim: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
