use std::process::ExitCode;

use clap::Parser;
use qgeo::cli::Cli;
use qgeo::{commands, config, output, CliError};

fn run() -> Result<bool, CliError> {
    let args = config::expand_args(std::env::args_os().collect())?;
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    let artifact = commands::run(&cli)?;
    let bytes = output::render(&artifact, cli.global.format)?;
    output::write(&bytes, cli.global.out.as_deref())?;
    for w in &artifact.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cli.global.strict && !artifact.warnings.is_empty())
}

fn main() -> ExitCode {
    match run() {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
