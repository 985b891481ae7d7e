//! `torusgaps`: run spectral and number-theoretic experiments, write a CSV
//! report and a JSON manifest.
//!
//! Exit codes: 0 all rows pass, 1 some row failed or a sample errored,
//! 2 invalid configuration, 3 resource budget exceeded.

mod args;
mod cache;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, DiophantineCommand, DirichletCommand};
use cache::SpectrumCache;
use report::{write_outputs, Failure, ManifestInfo, Outcome};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum(_) => "spectrum",
        Command::Pairs(_) => "pairs",
        Command::Smoothed(_) => "smoothed",
        Command::Diophantine(DiophantineCommand::Tquad(_)) => "diophantine tquad",
        Command::Diophantine(DiophantineCommand::Count8(_)) => "diophantine count8",
        Command::Diophantine(DiophantineCommand::Rough(_)) => "diophantine rough",
        Command::Dirichlet(DirichletCommand::Sweep(_)) => "dirichlet sweep",
        Command::Dirichlet(DirichletCommand::MeanValue(_)) => "dirichlet mean-value",
        Command::Dirichlet(DirichletCommand::Ramare(_)) => "dirichlet ramare",
        Command::Ensemble(_) => "ensemble",
        Command::Selftest(_) => "selftest",
    }
}

fn dispatch(cli: &Cli, cache: &SpectrumCache) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, cache),
        Command::Pairs(a) => commands::pairs(a, cache),
        Command::Smoothed(a) => commands::smoothed(a),
        Command::Diophantine(DiophantineCommand::Tquad(a)) => commands::tquad(a),
        Command::Diophantine(DiophantineCommand::Count8(a)) => commands::count8(a),
        Command::Diophantine(DiophantineCommand::Rough(a)) => commands::rough(a),
        Command::Dirichlet(DirichletCommand::Sweep(a)) => commands::sweep(a),
        Command::Dirichlet(DirichletCommand::MeanValue(a)) => commands::mean_value(a),
        Command::Dirichlet(DirichletCommand::Ramare(a)) => commands::ramare(a),
        Command::Ensemble(a) => commands::ensemble(a, cache),
        Command::Selftest(a) => commands::selftest(a),
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let workers = match cli.workers {
        Some(0) => return Err(report::config("--workers must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Runtime(e.into()))?;
    let cache = SpectrumCache::new(cli.cache_dir.as_deref());
    let start = Instant::now();
    let outcome = pool.install(|| dispatch(cli, &cache))?;
    let seconds = start.elapsed().as_secs_f64();

    let name = command_name(&cli.command);
    let info = ManifestInfo {
        command: name,
        config: serde_json::to_value(cli).map_err(|e| Failure::Runtime(e.into()))?,
        workers,
        seconds,
        cache: cache.summary(),
        warnings: cache.warnings(),
    };
    write_outputs(&cli.out, &outcome, info)?;
    for e in &outcome.errors {
        eprintln!("error: {e}");
    }
    eprintln!(
        "{name}: {} rows, {} failed, {} errors ({seconds:.2}s) -> {}",
        outcome.rows,
        outcome.failed_rows,
        outcome.errors.len(),
        cli.out.display()
    );
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
