//! Command-line front end for `ica-emk`: data generation, separation,
//! density fitting, benchmarks and the image demo.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O or format, 3 rank-deficient input,
//! 4 density or optimization failure.

pub mod args;
mod commands;
pub mod error;
pub mod io;
pub mod manifest;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Separate(a) => commands::separate(a),
        Command::Density(a) => commands::density(a),
        Command::Bench(a) => commands::bench(a),
        Command::DemixImages(a) => commands::demix_images(a),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
