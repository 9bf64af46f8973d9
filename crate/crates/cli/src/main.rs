use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use toric_gk_cli::{run, Command, Sink, INVALID_INPUT_EXIT};

/// Toric generalized Kähler geometry: scans, identity suites and exports.
#[derive(Debug, Parser)]
#[command(name = "toricgk", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration (optional for clifford-selftest).
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command, args.config.as_deref(), &Sink::new(args.output)) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INVALID_INPUT_EXIT)
        }
    }
}
