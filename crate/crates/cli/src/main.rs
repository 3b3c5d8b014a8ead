//! `gaptime`: estimate, test and simulate from the command line.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 unparseable
//! input, 4 unidentifiable estimand, 5 I/O failure.

mod args;
mod error;
mod estimate;
mod hypothesis;
mod input;
mod output;
mod simulate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(a) => estimate::run(a),
        Command::Test(a) => hypothesis::run(a),
        Command::Simulate(a) => simulate::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
