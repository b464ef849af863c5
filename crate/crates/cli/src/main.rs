//! Command-line frontend: synthetic scene generation, anti-aliasing runs,
//! PSNR comparison and the probe-count benchmark.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 contract violation.

mod args;
mod bench;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Error carrying the process exit code.
pub(crate) enum CliError {
    Io(String),
    Contract(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Contract(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Contract(m) => m,
        }
    }
}

impl From<slope_mlaa::Error> for CliError {
    fn from(e: slope_mlaa::Error) -> Self {
        use slope_mlaa::Error::*;
        match &e {
            Io { .. } | UnsupportedFormat(_) | CorruptImage(_) => CliError::Io(e.to_string()),
            DimensionMismatch { .. } | Contract(_) => CliError::Contract(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
