use std::process::ExitCode;

use clap::Parser;
use prefchoice_cli::{execute, Cli};

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved for phase errors
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
