mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use squeeze_core::SqueezeError;

use args::{Cli, Command};

/// Invalid input detected by the front end.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<SqueezeError>() {
        Some(SqueezeError::Domain(_) | SqueezeError::UnsupportedSize { .. } | SqueezeError::Geometry(_)) => EXIT_USAGE,
        Some(_) => EXIT_NUMERICAL,
        None => EXIT_OTHER,
    }
}

fn workers(cmd: &Command) -> usize {
    match cmd {
        Command::SweepChi(a) => a.common.workers,
        Command::SweepN(a) => a.common.workers,
        Command::OptimalChi(a) => a.common.workers,
        Command::Wigner(a) => a.common.workers,
        Command::Montecarlo(a) => a.workers,
        Command::Design(_) => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers(&cli.command)).build()?;
    pool.install(|| match &cli.command {
        Command::SweepChi(a) => commands::sweep_chi(a),
        Command::SweepN(a) => commands::sweep_n(a),
        Command::OptimalChi(a) => commands::optimal_chi(a),
        Command::Wigner(a) => commands::wigner(a),
        Command::Montecarlo(a) => commands::montecarlo(a),
        Command::Design(a) => commands::design(a),
    })
}

fn main() -> ExitCode {
    let argv = match config::expand_argv(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e).max(EXIT_USAGE));
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
