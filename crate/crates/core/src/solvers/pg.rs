//! Proximal gradient method.

use super::{check_dimension, RunTrace, SolverConfig, Stepper, TerminalStatus, TraceBuilder};
use crate::problem::{CompositeProblem, ProxCounter};
use crate::vector::DenseVector;
use crate::Result;

/// Which iterate `pg` returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgOption {
    /// The last iterate.
    I,
    /// The iterate with the smallest recorded proximal-gradient norm.
    II,
}

/// Proximal gradient: `x_{t+1} = prox_{g/L}(x_t - grad f(x_t) / L)`.
///
/// Each iteration measures `||G(x_t)||` as a byproduct of the update; the
/// run stops as soon as a measured norm reaches `target_eps` (the measured
/// point is the certified solution) or the prox budget runs out. Iteration
/// rows carry the objective of the new iterate and the norm measured at
/// the point stepped from.
pub fn pg(
    problem: &CompositeProblem,
    x0: &DenseVector,
    config: &SolverConfig,
    option: PgOption,
) -> Result<RunTrace> {
    config.validate()?;
    check_dimension(problem, x0)?;
    let mut counter = ProxCounter::new();
    let mut stepper = Stepper::new(config.eta_policy, problem.smooth().lipschitz_hint())?;
    let mut trace = TraceBuilder::new(config.record_every);

    let mut x = x0.to_vec();
    let mut best_norm = f64::INFINITY;
    let mut best_x = x.clone();
    let mut iter: u64 = 0;

    loop {
        let step = stepper.step(problem, &x, &mut counter)?;
        iter += 1;
        let gnorm = step.prox_grad_norm();
        if gnorm < best_norm {
            best_norm = gnorm;
            best_x.clone_from(&x);
        }
        if trace.recording() {
            let obj = problem.objective(&step.x_plus);
            trace.record(iter, obj, gnorm, counter.count());
        }

        if gnorm <= config.target_eps {
            let final_x = match option {
                PgOption::I => x,
                PgOption::II => best_x,
            };
            let obj = problem.objective(&final_x);
            let norm = match option {
                PgOption::I => gnorm,
                PgOption::II => best_norm,
            };
            return Ok(trace.finish(TerminalStatus::Converged, final_x, obj, norm, &counter, iter));
        }
        if counter.count() >= config.max_prox_calls {
            let final_x = match option {
                PgOption::I => step.x_plus,
                PgOption::II => best_x,
            };
            let obj = problem.objective(&final_x);
            let norm = match option {
                PgOption::I => gnorm,
                PgOption::II => best_norm,
            };
            return Ok(trace.finish(
                TerminalStatus::BudgetExhausted,
                final_x,
                obj,
                norm,
                &counter,
                iter,
            ));
        }
        x = step.x_plus;
    }
}
