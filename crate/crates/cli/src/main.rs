//! `pbergman`: solve cell maps, evaluate periodic Bergman kernels, run the
//! verification suite and the decay and Schur studies. Every output file
//! starts with `# pbergman <version> config_hash=<sha256> seed=<seed>`.
//!
//! Exit codes: 0 success, 1 verification or computation failure, 2 input
//! error, 3 I/O error.

mod commands;
mod config;
mod error;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{DecayArgs, FloquetArgs, KernelArgs, MapSolveArgs, SchurArgs};
use verify::VerifyArgs;

#[derive(Parser, Debug)]
#[command(name = "pbergman", version, about = "Bergman kernels of domains periodic in one direction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the conformal map of a polygonal cell and archive it.
    MapSolve(MapSolveArgs),
    /// Evaluate the periodic kernel on a grid of pairs or at one pair.
    Kernel(KernelArgs),
    /// Forward Floquet transform of a test function on the cell grid.
    Floquet(FloquetArgs),
    /// Run the verification suite and report JSON lines.
    Verify(VerifyArgs),
    /// Fit the exponential decay of the kernel along the channel.
    Decay(DecayArgs),
    /// Weighted Schur row bound and its window stability.
    Schur(SchurArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::MapSolve(a) => commands::map_solve(a),
        Command::Kernel(a) => commands::kernel(a),
        Command::Floquet(a) => commands::floquet(a),
        Command::Verify(a) => verify::verify(a),
        Command::Decay(a) => commands::decay(a),
        Command::Schur(a) => commands::schur(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pbergman: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
