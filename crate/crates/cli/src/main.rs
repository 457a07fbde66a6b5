mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

/// Exit status 1 for bad input, 2 for bad usage.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
}

impl From<pmm_ahp::Error> for CliError {
    fn from(e: pmm_ahp::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Invalid(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
