//! Command-line front end: `register`, `bench`, `vote-inspect` and
//! `generate`. Failures are reported as one JSON object on stderr with exit
//! code 2 (parse or usage), 3 (solver) or 4 (I/O).

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Register(a) => commands::register(a, stdout),
        Command::Bench(a) => commands::bench(a, stdout, stderr),
        Command::VoteInspect(a) => commands::vote_inspect(a, stdout, stderr),
        Command::Generate(a) => commands::generate(a, stdout),
    }
}
