//! Accelerated proximal gradient, plain and with periodic restarting.

use super::{
    check_dimension, RunTrace, SolverConfig, StageEvent, StageEventKind, Stepper, TerminalStatus,
    TraceBuilder,
};
use crate::problem::{CompositeProblem, OptError, ProxCounter};
use crate::vector::{add_scaled, DenseVector};
use crate::Result;

/// Accelerated proximal gradient with the simple momentum schedule
/// `beta_t = (t - 1) / (t + 2)`:
///
/// `y_t = x_t + beta_t (x_t - x_{t-1})`, `x_{t+1} = prox_{eta g}(y_t - eta grad f(y_t))`.
///
/// The free optimality measure is `||G(y_t)||`, obtained from the update
/// itself; the run stops when it reaches `target_eps` (`y_t` is then the
/// certified point). The objective sequence may be non-monotone; it is
/// recorded, never asserted on.
pub fn apg(problem: &CompositeProblem, x0: &DenseVector, config: &SolverConfig) -> Result<RunTrace> {
    config.validate()?;
    check_dimension(problem, x0)?;
    let mut counter = ProxCounter::new();
    let mut stepper = Stepper::new(config.eta_policy, problem.smooth().lipschitz_hint())?;
    let mut trace = TraceBuilder::new(config.record_every);

    let mut x_prev = x0.to_vec();
    let mut x = x0.to_vec();
    let mut t: u64 = 0;
    loop {
        t += 1;
        let beta = (t as f64 - 1.0) / (t as f64 + 2.0);
        let diff: Vec<f64> = x.iter().zip(&x_prev).map(|(a, b)| a - b).collect();
        let y = add_scaled(&x, beta, &diff);
        let step = stepper.step(problem, &y, &mut counter)?;
        let gnorm = step.prox_grad_norm();
        if trace.recording() {
            let obj = problem.objective(&step.x_plus);
            trace.record(t, obj, gnorm, counter.count());
        }
        if gnorm <= config.target_eps {
            let obj = problem.objective(&y);
            return Ok(trace.finish(TerminalStatus::Converged, y, obj, gnorm, &counter, t));
        }
        if counter.count() >= config.max_prox_calls {
            let obj = problem.objective(&step.x_plus);
            return Ok(trace.finish(
                TerminalStatus::BudgetExhausted,
                step.x_plus,
                obj,
                gnorm,
                &counter,
                t,
            ));
        }
        x_prev = x;
        x = step.x_plus;
    }
}

/// Restarting APG. Requires the error-bound exponent `theta`, the constant
/// `c`, and a caller-certified bound `eps0 >= F(x0) - F*`.
///
/// Runs `K = ceil(log2(eps0 / target_eps))` stages; stage `k` restarts APG
/// from the previous stage's output with momentum `tau / (tau + 3)` for
/// `t_k = ceil(2 c sqrt(L) eps_{k-1}^(theta - 1/2))` inner iterations,
/// after which the objective gap is at most `eps_k = eps0 / 2^k`. There is
/// no runtime test of the gap: the schedule itself is the guarantee, so
/// the returned status is `Converged` once all stages complete.
pub fn rapg(
    problem: &CompositeProblem,
    x0: &DenseVector,
    theta: f64,
    c: f64,
    eps0: f64,
    config: &SolverConfig,
) -> Result<RunTrace> {
    config.validate()?;
    check_dimension(problem, x0)?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(OptError::InvalidConfig(format!("theta must lie in (0, 1], got {theta}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(OptError::InvalidConfig(format!("c must be positive, got {c}")));
    }
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(OptError::InvalidConfig(format!("eps0 must be positive, got {eps0}")));
    }
    let mut counter = ProxCounter::new();
    let mut stepper = Stepper::new(config.eta_policy, problem.smooth().lipschitz_hint())?;
    let mut trace = TraceBuilder::new(config.record_every);

    let stages = ((eps0 / config.target_eps).log2().ceil() as i64).max(1) as u64;
    let mut x_stage = x0.to_vec();
    let mut global_iter: u64 = 0;
    let mut last_norm = f64::NAN;

    for k in 1..=stages {
        let eps_prev = eps0 / 2f64.powi(k as i32 - 1);
        let l = stepper.l();
        let t_k = (2.0 * c * l.sqrt() * eps_prev.powf(theta - 0.5)).ceil().max(1.0) as u64;

        let mut x = x_stage.clone();
        let mut y = x_stage.clone();
        for tau in 1..=t_k {
            let step = stepper.step(problem, &y, &mut counter)?;
            global_iter += 1;
            let gnorm = step.prox_grad_norm();
            last_norm = gnorm;
            if trace.recording() {
                let obj = problem.objective(&step.x_plus);
                trace.record(global_iter, obj, gnorm, counter.count());
            }
            if counter.count() >= config.max_prox_calls {
                let obj = problem.objective(&step.x_plus);
                return Ok(trace.finish(
                    TerminalStatus::BudgetExhausted,
                    step.x_plus,
                    obj,
                    gnorm,
                    &counter,
                    global_iter,
                ));
            }
            let momentum = tau as f64 / (tau as f64 + 3.0);
            let diff: Vec<f64> = step.x_plus.iter().zip(&x).map(|(a, b)| a - b).collect();
            y = add_scaled(&step.x_plus, momentum, &diff);
            x = step.x_plus;
        }
        x_stage = x;
        trace.event(StageEvent {
            kind: StageEventKind::StageAdvance,
            stage: k,
            restart: 0,
            iteration: global_iter,
            delta: None,
            c_e: None,
            eps: eps0 / 2f64.powi(k as i32),
            measured_norm: None,
        });
    }

    let obj = problem.objective(&x_stage);
    Ok(trace.finish(
        TerminalStatus::Converged,
        x_stage,
        obj,
        last_norm,
        &counter,
        global_iter,
    ))
}

/// Constant momentum for the strongly convex accelerated iteration:
/// `(sqrt(L) - sqrt(alpha)) / (sqrt(L) + sqrt(alpha))`.
pub fn sc_apg_step_sequence(l: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && l > 0.0 && alpha <= l) {
        return Err(OptError::InvalidConfig(format!(
            "need 0 < alpha <= L, got alpha = {alpha}, L = {l}"
        )));
    }
    Ok((l.sqrt() - alpha.sqrt()) / (l.sqrt() + alpha.sqrt()))
}
