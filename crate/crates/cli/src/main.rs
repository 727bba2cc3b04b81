//! `ssggm`: simulate data, fit spike-and-slab graphical models, summarize
//! posteriors, check kernels against enumeration, and benchmark samplers.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{bench, fit, generate, oracle, summarize};

/// Environment variable setting the worker thread count.
const THREADS_ENV: &str = "SSGGM_THREADS";

#[derive(Parser)]
#[command(
    name = "ssggm",
    version,
    about = "Bayesian Gaussian graphical models with a discrete spike-and-slab prior"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a ground-truth precision matrix and data.
    Generate(generate::GenerateArgs),
    /// Run a sampler on a data file.
    Fit(fit::FitArgs),
    /// Select edges and evaluate or compare fitted summaries.
    Summarize(summarize::SummarizeArgs),
    /// Enumerate the exact law of one column's edge pattern.
    Oracle(oracle::OracleArgs),
    /// Time samplers and track agreement of dispersed chains.
    Bench(bench::BenchArgs),
}

fn init_threads() -> Result<(), error::CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize =
        value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            error::CliError::usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| error::CliError::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|()| match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Fit(a) => fit::run(a),
        Command::Summarize(a) => summarize::run(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Bench(a) => bench::run(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
