use std::process::ExitCode;

use bcsphase_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bcsphase: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
