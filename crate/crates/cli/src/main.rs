//! `geowalk`: sample polytopes with the geodesic walk, inspect single
//! steps, check uniformity, compare against the Dikin walk and run the
//! Physarum LP dynamics. All outputs are files; all randomness is seeded.

mod commands;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::*;

#[derive(Debug, Parser)]
#[command(name = "geowalk", version = manifest::VERSION, about = "Geodesic-walk polytope sampler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the geodesic walk and write samples, stats and a manifest.
    Sample(SampleArgs),
    /// Compute one proposal from a given start point and velocity.
    Geodesic(GeodesicArgs),
    /// Integrate the Physarum dynamics of an LP.
    Physarum(PhysarumArgs),
    /// Uniformity report for a sample file.
    Diagnose(DiagnoseArgs),
    /// Acceptance and autocorrelation of the geodesic and Dikin walks over a grid of h.
    Compare(CompareArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Geodesic(a) => cmd_geodesic(a),
        Command::Physarum(a) => cmd_physarum(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Replay(a) => cmd_replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
