mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use stackboost::Error;

use args::Cli;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_DIMENSION: u8 = 3;
pub const EXIT_METHOD: u8 = 4;
pub const EXIT_USAGE: u8 = 5;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        Error::DimensionMismatch(_)
        | Error::NonFinite(_)
        | Error::Empty(_)
        | Error::DuplicateId(_)
        | Error::ConstantTarget
        | Error::TooFewColumns(_) => EXIT_DIMENSION,
        Error::TrialFailed { .. } | Error::MethodFailed { .. } => EXIT_METHOD,
        Error::InvalidConfig(_) | Error::UnsupportedM { .. } | Error::UnsupportedConfidence(_) => {
            EXIT_USAGE
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
