use std::process::ExitCode;

use clap::Parser;
use gpbayes_cli::commands::{run, Cli};
use gpbayes_cli::exit_code;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
