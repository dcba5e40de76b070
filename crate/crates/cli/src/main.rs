//! Command-line front end for bundlechoice.

mod commands;
mod plots;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{DiagnoseArgs, FitArgs, PrintDefaultsArgs, ReportArgs, SimulateArgs, WelfareArgs};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "BUNDLECHOICE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "bundlechoice",
    version,
    about = "Simulate, estimate and analyse bundled deductible choice"
)]
struct Cli {
    /// Worker threads. Overrides BUNDLECHOICE_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a population and simulate bundle choices.
    Simulate(SimulateArgs),
    /// Fit the model to a household file by maximum likelihood.
    Fit(FitArgs),
    /// Run identification and assumption diagnostics.
    Diagnose(DiagnoseArgs),
    /// Willingness-to-pay and bundling welfare tables.
    Welfare(WelfareArgs),
    /// Write plot-ready CSV files.
    Report(ReportArgs),
    /// Print the embedded default configuration.
    PrintDefaults(PrintDefaultsArgs),
}

/// A command-line or environment problem detected before any work starts.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// How a successful run ended.
pub enum Outcome {
    Done,
    NotConverged,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: optimizer did not converge; results were written");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Fit(args) => commands::fit(&args),
        Command::Diagnose(args) => commands::diagnose(&args),
        Command::Welfare(args) => commands::welfare(&args),
        Command::Report(args) => commands::report(&args),
        Command::PrintDefaults(args) => commands::print_defaults(&args),
    }
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| UsageError(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(UsageError("thread count must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("cannot start thread pool: {e}"))?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use bundlechoice::Error;
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_VALIDATION;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::ProbabilityDomain(_)
                | Error::Invalid { .. }
                | Error::Overlap
                | Error::Size { .. }
                | Error::MicViolation
                | Error::Parse { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::TomlDe(_) => EXIT_VALIDATION,
                _ => EXIT_INTERNAL,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_VALIDATION;
        }
    }
    EXIT_INTERNAL
}
