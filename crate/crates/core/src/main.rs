use std::io;
use std::process::ExitCode;

use clap::Parser;
use nlocal::cli::{run, Cli, Status};
use nlocal::Error;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; clap's own code 2 is reserved.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::InvariantViolated) => ExitCode::from(2),
        Err(e @ Error::OracleMismatch { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
