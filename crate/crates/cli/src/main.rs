use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use prorata::GameError;

mod args;
mod commands;
mod config;
mod output;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files or input data. Exit 2.
    Config(String),
    Game(GameError),
    /// Numeric or I/O failure while running. Exit 4.
    Runtime(String),
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Game(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Runtime(_) => "numeric",
            CliError::Game(e) if e.is_no_equilibrium() => "no-equilibrium",
            CliError::Game(GameError::InvalidParameter(_) | GameError::NonPositiveNetDemand(_)) => {
                "config"
            }
            CliError::Game(_) => "numeric",
        }
    }

    fn code(&self) -> u8 {
        match self.kind() {
            "config" => 2,
            "no-equilibrium" => 3,
            _ => 4,
        }
    }

    fn reason(&self) -> String {
        let text = match self {
            CliError::Config(m) | CliError::Runtime(m) => m.clone(),
            CliError::Game(e) => e.to_string(),
        };
        text.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("error[{}]: {}", err.kind(), err.reason());
    ExitCode::from(err.code())
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            // clap's first line carries the reason; the rest is usage help
            let first = text
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            return fail(&CliError::Config(first.to_string()));
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
