//! Adaptive accelerated gradient converging methods.
//!
//! Both variants run in stages indexed by `k`. Stage `k` starts from the
//! anchor `x_{k-1}` and repeatedly solves the regularized problem
//! `F(x) + (delta_k / 2) ||x - x_{k-1}||^2` with an accelerated inner loop
//! until the (proximal) gradient norm halves. The regularization weight
//! `delta_k` is sized from the current estimate `c_e` of the unknown
//! error-bound constant; if the inner loop exhausts its theoretical budget
//! `T_k` before the norm halves, the estimate was too small, so `c_e` is
//! grown by `gamma` and the stage restarts from the same anchor
//! (conditional restarting). `delta_k` is recomputed from the current
//! `c_e` at the top of every cycle.

use super::{
    check_dimension, HebParams, RunTrace, SolverConfig, StageEvent, StageEventKind, Stepper,
    TerminalStatus, TraceBuilder,
};
use crate::problem::{CompositeProblem, OptError, ProxCounter, SmoothOracle};
use crate::regularizers::{dual_averaging_min, prox_augmented};
use crate::solvers::adg_coefficient;
use crate::vector::{add_scaled, all_finite, combine, dot, norm2, sub, DenseVector};
use crate::Result;

/// Stage regularization for the smooth variant:
/// `delta_k = eps_{k-1}^((1-2 theta)/(1-theta)) / (6 c_e^(1/(1-theta)))`.
fn delta_smooth(theta: f64, eps_prev: f64, c_e: f64) -> f64 {
    let p = (1.0 - 2.0 * theta) / (1.0 - theta);
    eps_prev.powf(p) / (6.0 * c_e.powf(1.0 / (1.0 - theta)))
}

/// Stage regularization for the composite variant, capped at `L/32`.
fn delta_composite(theta: f64, eps_prev: f64, c_e: f64, l: f64, eps0: f64) -> f64 {
    let cap = l / 32.0;
    if theta <= 0.5 {
        let p = (1.0 - 2.0 * theta) / (1.0 - theta);
        let denom = 16.0 * c_e.powf(1.0 / (1.0 - theta)) * 2f64.powf(theta / (1.0 - theta));
        cap.min(eps_prev.powf(p) / denom)
    } else {
        cap.min(1.0 / (32.0 * c_e * c_e * eps0.powf(2.0 * theta - 1.0)))
    }
}

/// Inner budget of the smooth variant:
/// `ceil(2 sqrt((L+d)/d) log(sqrt(L(L+d))/d))`, at least 1.
fn inner_budget_smooth(l: f64, delta: f64) -> u64 {
    let t = 2.0 * ((l + delta) / delta).sqrt() * ((l * (l + delta)).sqrt() / delta).ln();
    t.ceil().max(1.0) as u64
}

/// Inner budget of the composite variant:
/// `ceil(sqrt(2L/d) log(sqrt(L(L+d))/d))`, at least 1.
fn inner_budget_composite(l: f64, delta: f64) -> u64 {
    let t = (2.0 * l / delta).sqrt() * ((l * (l + delta)).sqrt() / delta).ln();
    t.ceil().max(1.0) as u64
}

/// Backtracking acceptance test at the working constant `l`:
/// `f(x+) <= f(y) + <grad, x+ - y> + (l/2) ||x+ - y||^2`, with the same
/// rounding slack the plain backtracking step uses.
fn descent_ok(f: &dyn SmoothOracle, fy: f64, grad_y: &[f64], y: &[f64], x_plus: &[f64], l: f64) -> bool {
    let diff = sub(x_plus, y);
    let quad = fy + dot(grad_y, &diff) + 0.5 * l * dot(&diff, &diff);
    f.value(x_plus) <= quad + crate::step::DESCENT_TEST_SLACK * (1.0 + fy.abs())
}

/// Trial cap mirroring the one in `backtrack_step`.
const MAX_BACKTRACK_TRIALS: u32 = 65;

fn lipschitz_failure(l: f64) -> OptError {
    OptError::LipschitzSearchFailure { doublings: MAX_BACKTRACK_TRIALS - 1, reached: l }
}

/// Adaptive accelerated gradient converging method for smooth `f`
/// (`theta` restricted to `(0, 1/2]`: a smooth objective cannot satisfy
/// the error bound with a larger exponent near its minimizers).
///
/// `eps_0 = ||grad f(x_0)||`; each stage halves the gradient norm, driven
/// by the constant-momentum strongly convex accelerated iteration on
/// `f(x) + (delta_k/2) ||x - x_{k-1}||^2`. With `g = 0` every inner update
/// is the proximal mapping of the zero function, so the counter reports
/// one call per inner update (and one per rejected backtracking trial),
/// making budgets comparable with the composite variant.
pub fn adaagc_smooth(
    f: &dyn SmoothOracle,
    x0: &DenseVector,
    heb: &HebParams,
    config: &SolverConfig,
) -> Result<RunTrace> {
    config.validate()?;
    if heb.theta > 0.5 {
        return Err(OptError::InvalidConfig(format!(
            "adaagc_smooth requires theta in (0, 1/2], got {}",
            heb.theta
        )));
    }
    let mut counter = ProxCounter::new();
    let mut stepper = Stepper::new(config.eta_policy, f.lipschitz_hint())?;
    let mut trace = TraceBuilder::new(config.record_every);

    let grad0 = f.gradient(x0);
    if !all_finite(&grad0) {
        return Err(OptError::OracleFailure("non-finite gradient at x0".into()));
    }
    let eps0 = norm2(&grad0);
    trace.record(0, f.value(x0), eps0, counter.count());
    if eps0 <= config.target_eps {
        let obj = f.value(x0);
        return Ok(trace.finish(TerminalStatus::Converged, x0.to_vec(), obj, eps0, &counter, 0));
    }

    let mut c_e = heb.c0;
    let mut eps_prev = eps0;
    let mut x_stage = x0.to_vec();
    let mut total_iter: u64 = 0;

    for k in 1u64.. {
        let mut s: u64 = 1;
        'cycles: loop {
            let delta = delta_smooth(heb.theta, eps_prev, c_e);
            trace.event(StageEvent {
                kind: StageEventKind::CycleStart,
                stage: k,
                restart: s,
                iteration: total_iter,
                delta: Some(delta),
                c_e: Some(c_e),
                eps: eps_prev,
                measured_norm: None,
            });

            let mut x_prev = x_stage.clone();
            let mut y = x_stage.clone();
            let mut tau: u64 = 0;
            loop {
                // x-step on f_delta with step 1/(L + delta); backtracking
                // tests the descent condition of f itself at constant L,
                // which is equivalent (the delta-quadratic expands exactly).
                let fy = f.value(&y);
                let grad_y = f.gradient(&y);
                if !all_finite(&grad_y) {
                    return Err(OptError::OracleFailure("non-finite gradient".into()));
                }
                let mut trials = 0u32;
                let x_next = loop {
                    let l = stepper.l();
                    let grad_delta =
                        |i: usize| grad_y[i] + delta * (y[i] - x_stage[i]);
                    let candidate: Vec<f64> = (0..y.len())
                        .map(|i| y[i] - grad_delta(i) / (l + delta))
                        .collect();
                    counter.record();
                    if !stepper.adaptive() || descent_ok(f, fy, &grad_y, &y, &candidate, l) {
                        break candidate;
                    }
                    trials += 1;
                    if trials >= MAX_BACKTRACK_TRIALS {
                        return Err(lipschitz_failure(l));
                    }
                    stepper.grow();
                };
                tau += 1;
                total_iter += 1;

                let grad_x = f.gradient(&x_next);
                let gnorm = norm2(&grad_x);
                if trace.recording() {
                    trace.record(total_iter, f.value(&x_next), gnorm, counter.count());
                }

                let l = stepper.l();
                let beta = ((l + delta).sqrt() - delta.sqrt()) / ((l + delta).sqrt() + delta.sqrt());
                let diff = sub(&x_next, &x_prev);
                y = add_scaled(&x_next, beta, &diff);
                x_prev = x_next.clone();

                if gnorm <= config.target_eps {
                    let obj = f.value(&x_next);
                    return Ok(trace.finish(
                        TerminalStatus::Converged,
                        x_next,
                        obj,
                        gnorm,
                        &counter,
                        total_iter,
                    ));
                }
                if counter.count() >= config.max_prox_calls {
                    let obj = f.value(&x_next);
                    return Ok(trace.finish(
                        TerminalStatus::BudgetExhausted,
                        x_next,
                        obj,
                        gnorm,
                        &counter,
                        total_iter,
                    ));
                }
                if gnorm <= eps_prev / 2.0 {
                    eps_prev /= 2.0;
                    x_stage = x_next;
                    trace.event(StageEvent {
                        kind: StageEventKind::StageAdvance,
                        stage: k,
                        restart: s,
                        iteration: total_iter,
                        delta: Some(delta),
                        c_e: Some(c_e),
                        eps: eps_prev,
                        measured_norm: Some(gnorm),
                    });
                    break 'cycles;
                }
                if tau >= inner_budget_smooth(stepper.l(), delta) {
                    c_e *= heb.gamma;
                    s += 1;
                    trace.event(StageEvent {
                        kind: StageEventKind::ConditionalRestart,
                        stage: k,
                        restart: s,
                        iteration: total_iter,
                        delta: Some(delta),
                        c_e: Some(c_e),
                        eps: eps_prev,
                        measured_norm: Some(gnorm),
                    });
                    continue 'cycles;
                }
            }
        }
    }
    unreachable!("stage loop exits via return")
}

/// Adaptive accelerated gradient converging method for composite
/// `F = f + g` (`theta` in `(0, 1]`).
///
/// `eps_0 = ||G(x_0)||`. Each restart cycle anchors
/// `g_delta(x) = g(x) + (delta_k/2) ||x - x_{k-1}||^2` and runs the
/// accelerated dual gradient iteration on `f + g_delta`, which costs two
/// counted proxes per inner step (the augmented prox-gradient step and the
/// dual-averaging minimization). The stage and termination tests measure
/// `||G||` of the original, unaugmented problem at step `1/L`, costing one
/// more counted prox per inner step.
pub fn adaagc_composite(
    problem: &CompositeProblem,
    x0: &DenseVector,
    heb: &HebParams,
    config: &SolverConfig,
) -> Result<RunTrace> {
    config.validate()?;
    check_dimension(problem, x0)?;
    let f = problem.smooth();
    let g = problem.prox_oracle();
    let mut counter = ProxCounter::new();
    let mut stepper = Stepper::new(config.eta_policy, f.lipschitz_hint())?;
    let mut trace = TraceBuilder::new(config.record_every);

    // eps_0 = ||G(x_0)|| at the current working step size.
    let eps0 = {
        let grad0 = f.gradient(x0);
        if !all_finite(&grad0) {
            return Err(OptError::OracleFailure("non-finite gradient at x0".into()));
        }
        let l = stepper.l();
        let shifted = add_scaled(x0, -1.0 / l, &grad0);
        let xp = g.prox(&shifted, 1.0 / l);
        counter.record();
        let diff: Vec<f64> = x0.iter().zip(&xp).map(|(a, b)| (a - b) * l).collect();
        norm2(&diff)
    };
    trace.record(0, problem.objective(x0), eps0, counter.count());
    if eps0 <= config.target_eps {
        let obj = problem.objective(x0);
        return Ok(trace.finish(TerminalStatus::Converged, x0.to_vec(), obj, eps0, &counter, 0));
    }

    let mut c_e = heb.c0;
    let mut eps_prev = eps0;
    let mut x_stage = x0.to_vec();
    let mut total_iter: u64 = 0;

    for k in 1u64.. {
        let mut s: u64 = 1;
        'cycles: loop {
            let delta = delta_composite(heb.theta, eps_prev, c_e, stepper.l(), eps0);
            trace.event(StageEvent {
                kind: StageEventKind::CycleStart,
                stage: k,
                restart: s,
                iteration: total_iter,
                delta: Some(delta),
                c_e: Some(c_e),
                eps: eps_prev,
                measured_norm: None,
            });

            // Fresh inner state per cycle, anchored at the stage point.
            let mut a_sum = 0.0f64;
            let mut v = x_stage.clone();
            let mut x = x_stage.clone();
            let mut accumulated = vec![0.0; x_stage.len()];
            let mut t: u64 = 0;
            loop {
                let a = adg_coefficient(a_sum, delta, stepper.l());
                let a_next = a_sum + a;
                let y = combine(a_sum / a_next, &x, a / a_next, &v);

                let fy = f.value(&y);
                let grad_y = f.gradient(&y);
                if !all_finite(&grad_y) {
                    return Err(OptError::OracleFailure("non-finite gradient".into()));
                }
                let mut trials = 0u32;
                let x_next = loop {
                    let l = stepper.l();
                    let shifted = add_scaled(&y, -1.0 / l, &grad_y);
                    let candidate = prox_augmented(g, &shifted, 1.0 / l, delta, &x_stage);
                    counter.record();
                    if !stepper.adaptive() || descent_ok(f, fy, &grad_y, &y, &candidate, l) {
                        break candidate;
                    }
                    trials += 1;
                    if trials >= MAX_BACKTRACK_TRIALS {
                        return Err(lipschitz_failure(l));
                    }
                    stepper.grow();
                };

                let grad_x = f.gradient(&x_next);
                for (acc, gi) in accumulated.iter_mut().zip(&grad_x) {
                    *acc += a * gi;
                }
                v = dual_averaging_min(g, &accumulated, a_next, delta, &x_stage);
                counter.record();

                // Stage/termination measure: G of the original problem.
                let l = stepper.l();
                let shifted = add_scaled(&x_next, -1.0 / l, &grad_x);
                let xp = g.prox(&shifted, 1.0 / l);
                counter.record();
                let gnorm = {
                    let diff: Vec<f64> =
                        x_next.iter().zip(&xp).map(|(a, b)| (a - b) * l).collect();
                    norm2(&diff)
                };

                t += 1;
                total_iter += 1;
                if trace.recording() {
                    trace.record(total_iter, problem.objective(&x_next), gnorm, counter.count());
                }
                a_sum = a_next;
                x = x_next;

                if gnorm <= config.target_eps {
                    let obj = problem.objective(&x);
                    return Ok(trace.finish(
                        TerminalStatus::Converged,
                        x,
                        obj,
                        gnorm,
                        &counter,
                        total_iter,
                    ));
                }
                if counter.count() >= config.max_prox_calls {
                    let obj = problem.objective(&x);
                    return Ok(trace.finish(
                        TerminalStatus::BudgetExhausted,
                        x,
                        obj,
                        gnorm,
                        &counter,
                        total_iter,
                    ));
                }
                if gnorm <= eps_prev / 2.0 {
                    eps_prev /= 2.0;
                    x_stage = x;
                    trace.event(StageEvent {
                        kind: StageEventKind::StageAdvance,
                        stage: k,
                        restart: s,
                        iteration: total_iter,
                        delta: Some(delta),
                        c_e: Some(c_e),
                        eps: eps_prev,
                        measured_norm: Some(gnorm),
                    });
                    break 'cycles;
                }
                if t >= inner_budget_composite(stepper.l(), delta) {
                    c_e *= heb.gamma;
                    s += 1;
                    trace.event(StageEvent {
                        kind: StageEventKind::ConditionalRestart,
                        stage: k,
                        restart: s,
                        iteration: total_iter,
                        delta: Some(delta),
                        c_e: Some(c_e),
                        eps: eps_prev,
                        measured_norm: Some(gnorm),
                    });
                    continue 'cycles;
                }
            }
        }
    }
    unreachable!("stage loop exits via return")
}
