use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = gifpo_cli::cli::Cli::parse();
    let mut out = std::io::stdout().lock();
    match gifpo_cli::cli::run(args, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
