use std::process::ExitCode;

use clap::Parser;
use fuzzy_effort_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fuzzy-effort: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
