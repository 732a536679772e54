//! Command-line front end: batch simulation, exact enumeration, probability
//! sweeps, the non-commutativity walk and the interactive session server.
//!
//! Exit codes: 0 on success, 1 when a well-formed command fails at run time,
//! 2 for invalid or inconsistent flags.

pub mod args;
pub mod commands;
mod error;
pub mod table;

use std::io::Write;

pub use args::{Cli, Command, Format};
pub use error::CliError;

/// Runs one command, writing its report to `out`.
pub fn run(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => commands::simulate(&a, out),
        Command::Exact(a) => commands::exact(&a, out),
        Command::Sweep(a) => commands::sweep(&a, out),
        Command::Noncommute => commands::noncommute(out),
        Command::Serve(a) => commands::serve(&a, out),
    }
}
