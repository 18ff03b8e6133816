//! Scenario-driven command-line front end.
//!
//! `nonmarkov <subcommand> --scenario <path> [--out <dir>]`: every subcommand
//! reads one TOML scenario, writes its outputs (plus a scenario echo) into
//! the output directory, and prints the paths it wrote. Failures print a
//! machine-readable error JSON to stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nonmarkov::cli::{self, Command};

#[derive(Parser)]
#[command(
    name = "nonmarkov",
    version,
    about = "Exact dissipation and decoherence dynamics of a bosonic mode \
             coupled to a structured reservoir"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve u(t), v(t) and the master-equation coefficients; write trajectory.tsv.
    Solve(RunArgs),
    /// Bound-pole and continuum analysis; write poles.json.
    Poles(RunArgs),
    /// Render cat-state Wigner frames; write frame files and frames.json.
    Wigner(RunArgs),
    /// Cross-check the closed forms against the Fock-basis integrator; write
    /// oracle_report.json.
    OracleCheck(RunArgs),
    /// Summarize poles and the steady envelope over a coupling grid; write sweep.csv.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (overrides the scenario's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.cmd {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Poles(a) => (Command::Poles, a),
        Cmd::Wigner(a) => (Command::Wigner, a),
        Cmd::OracleCheck(a) => (Command::OracleCheck, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    match cli::run(cmd, &args.scenario, args.out.as_deref()) {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", cli::error_json(&e));
            ExitCode::FAILURE
        }
    }
}
