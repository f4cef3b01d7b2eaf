use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lap_lab::cli::{init_threads, run, Command};

/// Limiting absorption experiments for `-mu^{-1} Delta` on layered media.
#[derive(Parser, Debug)]
#[command(name = "lap-lab", version)]
struct Args {
    /// What to run.
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    config: PathBuf,
    /// Override a configuration entry, e.g. `--set grid.h=0.125`.
    #[arg(long = "set", value_name = "KEY.PATH=VALUE")]
    overrides: Vec<String>,
    /// Output directory; replaces `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_threads();
    let outcome = run(
        args.command,
        &args.config,
        &args.overrides,
        args.out.as_deref(),
    );
    ExitCode::from(outcome.code() as u8)
}
