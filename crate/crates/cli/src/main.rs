//! `rbfk`: experiment runner for low-rank RBF kernel expansions.
//!
//! Exit codes: 0 success, 1 input/output or format error, 2 constraint
//! violation, 3 resource cap, 4 numerical failure.

mod args;
mod cmd;
mod output;

use std::process::ExitCode;

use clap::Parser;

use rbf_lowrank::{Error, ErrorClass, Result};

use args::{Cli, Command};

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.globals;
    let artifacts = match &cli.command {
        Command::Factorize(a) => cmd::factorize(g, a)?,
        Command::Bounds(a) => cmd::bounds(a)?,
        Command::RankSweep(a) => cmd::rank_sweep_cmd(g, a)?,
        Command::Spectrum(a) => cmd::spectrum(g, a)?,
        Command::Reconstruct(a) => cmd::reconstruct(g, a)?,
        Command::Sample(a) => cmd::sample(g, a)?,
        Command::Replay(r) => {
            let text = std::fs::read_to_string(&r.file)?;
            let mut recorded = output::read_config(&text)?;
            if matches!(recorded.command, Command::Replay(_)) {
                return Err(Error::Format("a replay cannot record another replay".into()));
            }
            recorded.globals.out = g.out.clone();
            recorded.globals.threads = g.threads;
            return run(&recorded);
        }
    };
    output::emit(cli, &artifacts, g.out.as_deref())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Constraint => 2,
        ErrorClass::Resource => 3,
        ErrorClass::Numerical => 4,
        ErrorClass::Other => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    faer::set_global_parallelism(faer::Par::Seq);
    if let Some(n) = cli.globals.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("rbfk: could not configure {n} threads: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbfk: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
