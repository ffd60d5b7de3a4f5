//! Command-line front end for the `dualphase` simulator: settings, PGM and
//! CSV formats, and the experiment drivers behind the `dualphase` binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod curves;
pub mod error;
pub mod pgm;

pub use error::{CliError, Result};

use config::Settings;

/// The config file (if any) with every flag given on the command line applied on top.
pub fn settings(cli: &cli::Cli) -> Result<Settings> {
    let file = match &cli.run.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    Ok(file.overridden_by(cli.run.flags()))
}

pub fn run(cli: &cli::Cli) -> Result<commands::Outcome> {
    commands::execute(&cli.command, settings(cli)?)
}
