//! Runs the (solver, eps) grid of an experiment and writes the results
//! CSV, optionally with one trace CSV per cell.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};

use proxopt::solvers::{
    adaagc_composite, apg, pg, rapg, EtaPolicy, HebParams, PgOption, RunTrace, SolverConfig,
    TerminalStatus,
};
use proxopt::vector::DenseVector;

use crate::config::{ExperimentConfig, PreparedExperiment, SolverBlock};

pub const CSV_HEADER: &str =
    "solver,dataset,loss,regularizer,lambda,eps,prox_calls,wall_seconds,status";

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub solver: String,
    pub eps: f64,
    pub prox_calls: u64,
    pub wall_seconds: f64,
    pub status: TerminalStatus,
    pub error: Option<String>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub rows: Vec<CellOutcome>,
    pub csv_path: PathBuf,
    pub dataset_name: String,
}

impl RunSummary {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.status == TerminalStatus::Converged)
    }
}

fn run_cell(
    prepared: &PreparedExperiment,
    config: &ExperimentConfig,
    solver: &SolverBlock,
    eps: f64,
    record_every: u64,
) -> Result<RunTrace, proxopt::problem::OptError> {
    let x0 = DenseVector::zeros(prepared.problem.dimension());
    let eta = match config.eta.as_str() {
        "fixed" => EtaPolicy::Fixed { l: config.fixed_l.expect("validated") },
        _ => EtaPolicy::Backtracking,
    };
    let solver_config = SolverConfig::new(eps)
        .with_budget(config.max_prox_calls)
        .with_eta(eta)
        .with_record_every(record_every);
    match solver.name.as_str() {
        "pg1" => pg(&prepared.problem, &x0, &solver_config, PgOption::I),
        "pg2" => pg(&prepared.problem, &x0, &solver_config, PgOption::II),
        "apg" => apg(&prepared.problem, &x0, &solver_config),
        "rapg" => rapg(
            &prepared.problem,
            &x0,
            prepared.theta,
            solver.c.expect("validated"),
            solver.eps0.expect("validated"),
            &solver_config,
        ),
        "adaagc" => {
            let heb = HebParams::new(prepared.theta, config.c0, config.gamma)?;
            adaagc_composite(&prepared.problem, &x0, &heb, &solver_config)
        }
        other => unreachable!("validated solver name {other}"),
    }
}

fn write_trace(dir: &Path, dataset: &str, solver: &str, eps: f64, trace: &RunTrace) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{dataset}_{solver}_{eps:e}.csv"));
    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(out, "iteration,objective,prox_grad_norm,prox_calls")?;
    for r in &trace.records {
        writeln!(out, "{},{},{},{}", r.iteration, r.objective, r.prox_grad_norm, r.prox_calls)?;
    }
    Ok(())
}

/// Runs every (solver, eps) cell from `x0 = 0`, in parallel across cells
/// when `jobs != 1`. Cells are written to the CSV in configuration order
/// regardless of completion order, so the output is byte-identical across
/// runs except for the wall_seconds column. A failing cell records
/// `status = failed` and the grid continues.
pub fn run_experiment(
    config_path: &Path,
    output: Option<PathBuf>,
    trace_dir: Option<PathBuf>,
    jobs: Option<usize>,
) -> Result<RunSummary> {
    let config = ExperimentConfig::load(config_path)?;
    let prepared = crate::config::prepare(&config)?;
    let record_every = if trace_dir.is_some() { 1 } else { 0 };

    let cells: Vec<(usize, &SolverBlock, f64)> = config
        .solvers
        .iter()
        .flat_map(|s| config.eps.iter().map(move |&e| (s, e)))
        .enumerate()
        .map(|(i, (s, e))| (i, s, e))
        .collect();

    let run_all = || -> Vec<CellOutcome> {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|(_, solver, eps)| {
                let start = Instant::now();
                let result = run_cell(&prepared, &config, solver, *eps, record_every);
                let wall = start.elapsed().as_secs_f64();
                match result {
                    Ok(trace) => {
                        if let Some(dir) = &trace_dir {
                            if let Err(e) =
                                write_trace(dir, &prepared.dataset_name, &solver.name, *eps, &trace)
                            {
                                eprintln!("warning: could not write trace: {e}");
                            }
                        }
                        CellOutcome {
                            solver: solver.name.clone(),
                            eps: *eps,
                            prox_calls: trace.prox_calls,
                            wall_seconds: wall,
                            status: trace.status,
                            error: None,
                        }
                    }
                    Err(err) => CellOutcome {
                        solver: solver.name.clone(),
                        eps: *eps,
                        prox_calls: 0,
                        wall_seconds: wall,
                        status: TerminalStatus::Failed,
                        error: Some(err.to_string()),
                    },
                }
            })
            .collect()
    };

    let rows = match jobs {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot build worker pool")?
            .install(run_all),
        _ => run_all(),
    };

    let csv_path = output.unwrap_or_else(|| {
        let stem = config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "experiment".into());
        config_path.with_file_name(format!("{stem}.results.csv"))
    });
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&csv_path)
            .with_context(|| format!("cannot create {}", csv_path.display()))?,
    );
    writeln!(out, "{CSV_HEADER}")?;
    for row in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{},{:.3},{}",
            row.solver,
            prepared.dataset_name,
            prepared.loss_name,
            prepared.regularizer_name,
            prepared.lambda,
            row.eps,
            row.prox_calls,
            row.wall_seconds,
            row.status.as_str()
        )?;
    }
    out.flush()?;

    for row in &rows {
        if let Some(err) = &row.error {
            eprintln!("cell ({}, {:e}) failed: {err}", row.solver, row.eps);
        }
    }

    Ok(RunSummary {
        rows,
        csv_path,
        dataset_name: prepared.dataset_name.clone(),
    })
}
