//! Accelerated dual gradient method for `f + g` with strongly convex `g`.

use super::{RunTrace, TerminalStatus, TraceBuilder};
use crate::problem::{OptError, ProxCounter, ProxOracle, SmoothOracle};
use crate::vector::{add_scaled, combine, norm2, DenseVector};
use crate::Result;

/// Positive root of `a^2 / (a_sum + a) = 2 (1 + delta * a_sum) / l`.
pub fn adg_coefficient(a_sum: f64, delta: f64, l: f64) -> f64 {
    debug_assert!(a_sum >= 0.0 && delta >= 0.0 && l > 0.0);
    let q = 2.0 * (1.0 + delta * a_sum) / l;
    0.5 * (q + (q * q + 4.0 * q * a_sum).sqrt())
}

/// Dual-averaging state: the coefficient sum, the averaging iterate `v`,
/// the weighted gradient accumulator, and the primal iterate.
///
/// `a_sum` starts at 0 and is strictly increasing across iterations.
#[derive(Debug, Clone)]
pub struct AdgState {
    pub a_sum: f64,
    pub v: Vec<f64>,
    pub accumulated_grad: Vec<f64>,
    pub x: Vec<f64>,
}

impl AdgState {
    pub fn new(x0: &[f64]) -> Self {
        AdgState {
            a_sum: 0.0,
            v: x0.to_vec(),
            accumulated_grad: vec![0.0; x0.len()],
            x: x0.to_vec(),
        }
    }
}

/// Runs the accelerated dual gradient iteration for exactly `iterations`
/// steps (0 returns `x0` unchanged). Per step:
///
/// 1. `a` solves the coefficient equation with the strong convexity
///    `alpha` of `g`;
/// 2. `y = (a_sum * x + a * v) / (a_sum + a)`;
/// 3. `x <- prox_{g/L}(y - grad f(y) / L)`;
/// 4. `v` minimizes `0.5 ||u - x0||^2 + <accumulated_grad, u> + a_sum * g(u)`,
///    with gradients accumulated at the primal iterates.
///
/// `g` must be `alpha`-strongly convex (caller-certified; the adaptive
/// solvers supply the delta-augmented regularizer). The smoothness
/// constant comes from `f`'s Lipschitz hint. Two proxes per iteration are
/// counted. The recorded norm is the free measure `||G(y_t)||`.
pub fn adg(
    f: &dyn SmoothOracle,
    g: &dyn ProxOracle,
    alpha: f64,
    x0: &DenseVector,
    iterations: u64,
) -> Result<RunTrace> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(OptError::InvalidConfig(format!(
            "adg requires alpha-strongly convex g with alpha > 0, got {alpha}"
        )));
    }
    let l = f
        .lipschitz_hint()
        .ok_or_else(|| OptError::InvalidConfig("adg requires a Lipschitz hint on f".into()))?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(OptError::InvalidConfig(format!("invalid Lipschitz hint {l}")));
    }

    let mut counter = ProxCounter::new();
    let mut trace = TraceBuilder::new(1);
    let mut state = AdgState::new(x0);
    let objective = |x: &[f64]| f.value(x) + g.value(x);

    let mut last_norm = f64::NAN;
    for t in 0..iterations {
        let a = adg_coefficient(state.a_sum, alpha, l);
        let a_next = state.a_sum + a;
        let y = combine(state.a_sum / a_next, &state.x, a / a_next, &state.v);
        let grad_y = f.gradient(&y);
        let shifted = add_scaled(&y, -1.0 / l, &grad_y);
        let x_next = g.prox(&shifted, 1.0 / l);
        counter.record();
        let gnorm = {
            let diff: Vec<f64> = y.iter().zip(&x_next).map(|(a, b)| (a - b) * l).collect();
            norm2(&diff)
        };
        last_norm = gnorm;

        let grad_x = f.gradient(&x_next);
        for (acc, gi) in state.accumulated_grad.iter_mut().zip(&grad_x) {
            *acc += a * gi;
        }
        let v_shift: Vec<f64> = x0
            .iter()
            .zip(&state.accumulated_grad)
            .map(|(x0i, gi)| x0i - gi)
            .collect();
        state.v = g.prox(&v_shift, a_next);
        counter.record();

        debug_assert!(a_next > state.a_sum);
        state.a_sum = a_next;
        state.x = x_next;
        trace.record(t + 1, objective(&state.x), gnorm, counter.count());
    }

    let obj = objective(&state.x);
    Ok(trace.finish(
        TerminalStatus::Converged,
        state.x,
        obj,
        last_norm,
        &counter,
        iterations,
    ))
}
