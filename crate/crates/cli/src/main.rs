//! `rlip` — solvers, comparison grids, tuning and exact oracles for the
//! reliable capacitated location-inventory problem.

use std::process::ExitCode;

use clap::Parser;
use rlip_cli::cli::{Cli, Command};
use rlip_cli::commands;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Solve(args) => commands::solve(args),
        Command::Compare(args) => commands::compare(args),
        Command::Tune(args) => commands::tune(args),
        Command::Oracle(args) => commands::oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
