//! Command-line runner for the experiment sweeps.
//!
//! Exit codes: 0 success, 1 output or numerical error, 2 spec error,
//! 3 non-converged game run when the spec requires convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twr_secrecy::experiment::{load_spec, run_experiment, ExperimentError, ExperimentName};

#[derive(Parser)]
#[command(
    version,
    about = "Secrecy-rate and jamming-market experiments for two-way untrusted relaying"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment spec and write its CSV table.
    Run {
        spec: PathBuf,
        /// Output CSV path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the spec's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress the summary on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// List the available experiment names.
    ListExperiments,
    /// Parse and validate a spec without running it.
    Validate { spec: PathBuf },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

fn fail(err: &ExperimentError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_spec_error() {
        EXIT_SPEC
    } else {
        EXIT_FAILURE
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListExperiments => {
            for name in ExperimentName::ALL {
                println!("{:<24} {}", name.as_str(), name.description());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { spec } => match load_spec(&spec) {
            Ok(s) => {
                println!("{}: ok ({})", spec.display(), s.name);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run {
            spec,
            out,
            seed,
            quiet,
        } => {
            let mut spec = match load_spec(&spec) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            if let Some(seed) = seed {
                spec.seed = seed;
                if let Err(e) = spec.validate() {
                    return fail(&e);
                }
            }
            let table = match run_experiment(&spec) {
                Ok(t) => t,
                Err(e) => return fail(&e),
            };
            let written = match &out {
                Some(path) => std::fs::File::create(path)
                    .and_then(|f| table.write_csv(std::io::BufWriter::new(f)))
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => table
                    .write_csv(std::io::stdout().lock())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write table: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
            if !quiet {
                eprintln!(
                    "{}: {} rows, {} non-converged game runs",
                    spec.name,
                    table.rows.len(),
                    table.nonconverged_runs
                );
            }
            if spec.run.require_convergence && table.nonconverged_runs > 0 {
                eprintln!(
                    "error: {} game runs did not converge",
                    table.nonconverged_runs
                );
                return ExitCode::from(EXIT_NONCONVERGED);
            }
            ExitCode::SUCCESS
        }
    }
}
