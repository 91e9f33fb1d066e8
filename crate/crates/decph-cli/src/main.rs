//! decph: mesh generation, structural verification, reduction reports, and
//! port-Hamiltonian simulation runs from one binary.
//!
//! Exit codes: 0 success, 1 a check or run failed its threshold, 2 usage
//! or configuration error (including unreadable inputs).

mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use decph::DecError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "decph",
    version,
    about = "Simplicial Dirac structures, symmetry reduction, and port-Hamiltonian runs"
)]
struct Cli {
    /// Seed for sampled structural checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for generated files; created if missing.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a mesh, validate it, and write it with its validation report.
    Mesh(commands::mesh::MeshArgs),
    /// Run the structural verification suite on a mesh file.
    Verify(commands::verify::VerifyArgs),
    /// Compose the reduction and write its report.
    Reduce(commands::reduce::ReduceArgs),
    /// Integrate a configured run and write its trajectory.
    Simulate(commands::simulate::SimulateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    let outcome = match &cli.command {
        Command::Mesh(args) => commands::mesh::run(&ctx, args),
        Command::Verify(args) => commands::verify::run(&ctx, args),
        Command::Reduce(args) => commands::reduce::run(&ctx, args),
        Command::Simulate(args) => commands::simulate::run(&ctx, args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Usage and configuration problems exit 2; everything else is a failed
/// domain check and exits 1.
fn exit_code_for(e: &DecError) -> u8 {
    match e {
        DecError::Config { .. }
        | DecError::InvalidArgument(_)
        | DecError::Io(_)
        | DecError::Serde(_)
        | DecError::DegreeOutOfRange { .. } => 2,
        _ => 1,
    }
}
