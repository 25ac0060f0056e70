use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ovlab_cli::commands::{self, GlobalArgs};

/// Pseudospectral experiments for the 2-D Euler/Voigt-Oldroyd-B system.
#[derive(Parser)]
#[command(name = "ovlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config; relative paths resolve under
    /// $OV_LAB_OUTPUT_ROOT).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed override for the initial-condition generators.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweep members.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the dispersion relation λ±(k) with a stepper cross-check.
    Dispersion,
    /// Integrate the norm-inflation ODE over a list of wavenumbers.
    Inflate,
    /// Run one Euler- or Voigt-Oldroyd-B simulation.
    Simulate,
    /// Run a Voigt ε-sweep plus a Navier-Stokes reference and limit metrics.
    Sweep,
    /// Re-verify a stored run directory (checksums, invariants, ledger).
    Audit {
        /// Run directory containing manifest.json.
        run_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = GlobalArgs {
        config: cli.config,
        output: cli.output,
        seed: cli.seed,
        threads: cli.threads,
    };
    let result = match &cli.command {
        Command::Dispersion => commands::dispersion::execute(&args),
        Command::Inflate => commands::inflate::execute(&args),
        Command::Simulate => commands::simulate::execute(&args),
        Command::Sweep => commands::sweep::execute(&args),
        Command::Audit { run_dir } => commands::audit::execute(run_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
