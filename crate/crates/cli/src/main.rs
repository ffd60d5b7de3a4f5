use std::process::ExitCode;

use clap::Parser;
use dualphase_cli::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dualphase_cli::run(&cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("dualphase: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
