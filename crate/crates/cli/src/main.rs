use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "proxbench", about = "Composite-optimization solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (solver, eps) cell of an experiment config and write a
    /// results CSV. Exits 0 only if every cell converged.
    Run {
        /// Experiment config (TOML).
        config: PathBuf,
        /// Results CSV path (default: `<config stem>.results.csv`).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write per-run iteration traces into this directory.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
        /// Worker threads for running cells (default: rayon's choice).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Join result CSVs and print per-cell speedup factors.
    Report {
        /// One or more results CSV files.
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output, trace_dir, jobs } => {
            match proxopt_cli::runner::run_experiment(&config, output, trace_dir, jobs) {
                Ok(summary) => {
                    match proxopt_cli::report::compare_report(&[&summary.csv_path]) {
                        Ok(table) => print!("{table}"),
                        Err(e) => eprintln!("report error: {e}"),
                    }
                    println!("results written to {}", summary.csv_path.display());
                    if summary.all_converged() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Report { csv } => match proxopt_cli::report::compare_report(&csv) {
            Ok(table) => {
                print!("{table}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}
