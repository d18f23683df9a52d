//! Command-line front end for the exact vertex-algebra engine.
//!
//! Output is buffered and written only on success, so a failing invocation
//! never leaves partial output behind. Exit codes: 0 for a holding check or
//! computed value, 1 for a detected violation, 2 for input errors.

use std::process::ExitCode;

use clap::Parser;
use gva::commands::{self, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok((output, code)) => {
            print!("{output}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
