//! The proximal-gradient map, backtracking Lipschitz search, and the
//! optimality measure built from them.
//!
//! For `F = f + g` and a step size `eta`, the map is
//! `x+ = prox_{eta g}(x - eta * grad f(x))` and the proximal gradient is
//! `G_eta(x) = (x - x+) / eta`. A point is optimal iff `G_eta(x) = 0`, so
//! every solver in this crate uses `||G_eta(x)||_2` for restarting and
//! termination decisions.

use crate::problem::{CompositeProblem, OptError, ProxCounter};
use crate::vector::{all_finite, dot, norm2};
use crate::Result;

/// Result of one proximal-gradient map evaluation.
///
/// `prox_grad` is reconstructed from the inputs as `(x - x_plus) / eta`,
/// bitwise; `prox_calls` is the cumulative counter value after the single
/// prox invocation this evaluation performs.
#[derive(Debug, Clone)]
pub struct ProxGradResult {
    pub x_plus: Vec<f64>,
    pub prox_grad: Vec<f64>,
    pub eta: f64,
    pub prox_calls: u64,
}

impl ProxGradResult {
    pub fn prox_grad_norm(&self) -> f64 {
        norm2(&self.prox_grad)
    }
}

/// Working estimate of the smoothness constant of `f`.
///
/// The estimate only grows within a solver run: accepted values are never
/// reset, which keeps proximal-call counts deterministic.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzEstimate {
    current: f64,
    factor: f64,
}

impl LipschitzEstimate {
    pub fn new(initial: f64, factor: f64) -> Result<Self> {
        if !(initial > 0.0) || !(factor > 1.0) {
            return Err(OptError::InvalidConfig(format!(
                "LipschitzEstimate needs initial > 0 and factor > 1, got {initial} and {factor}"
            )));
        }
        Ok(LipschitzEstimate {
            current: initial,
            factor,
        })
    }

    /// Start from the oracle's hint when present, else 1.0, with the
    /// standard doubling factor.
    pub fn from_hint(hint: Option<f64>) -> Self {
        LipschitzEstimate {
            current: hint.filter(|l| *l > 0.0).unwrap_or(1.0),
            factor: 2.0,
        }
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// Raise the estimate to at least `l`. Never lowers it.
    pub fn raise_to(&mut self, l: f64) {
        if l > self.current {
            self.current = l;
        }
    }

    fn grow(&mut self) {
        self.current *= self.factor;
    }
}

const MAX_DOUBLINGS: u32 = 64;

/// Relative slack in the backtracking acceptance test. Near convergence
/// the two sides of the descent inequality agree to rounding error; the
/// slack keeps value noise from doubling the estimate forever (the
/// estimate is monotone, so one spurious rejection is permanent).
pub const DESCENT_TEST_SLACK: f64 = 1e-12;

/// One evaluation of the proximal-gradient map at step size `eta`.
///
/// Increments the prox counter by exactly 1.
pub fn prox_grad_map(
    problem: &CompositeProblem,
    x: &[f64],
    eta: f64,
    counter: &mut ProxCounter,
) -> Result<ProxGradResult> {
    debug_assert!(eta > 0.0);
    debug_assert!(all_finite(x));
    let grad = problem.smooth().gradient(x);
    if !all_finite(&grad) {
        return Err(OptError::OracleFailure(
            "smooth oracle returned a non-finite gradient".into(),
        ));
    }
    let shifted: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - eta * gi).collect();
    let x_plus = problem.prox_oracle().prox(&shifted, eta);
    counter.record();
    let prox_grad: Vec<f64> = x.iter().zip(&x_plus).map(|(xi, pi)| (xi - pi) / eta).collect();
    Ok(ProxGradResult {
        x_plus,
        prox_grad,
        eta,
        prox_calls: counter.count(),
    })
}

/// Proximal-gradient step at `y` with backtracking on the smoothness
/// constant: the estimate is doubled until
/// `f(x+) <= f(y) + <grad f(y), x+ - y> + (L/2) ||x+ - y||^2`
/// holds. Each trial costs one counted prox call. The returned estimate
/// carries the accepted constant and is reused by the caller's next step.
pub fn backtrack_step(
    problem: &CompositeProblem,
    y: &[f64],
    est: LipschitzEstimate,
    counter: &mut ProxCounter,
) -> Result<(ProxGradResult, LipschitzEstimate)> {
    let f = problem.smooth();
    let fy = f.value(y);
    let grad = f.gradient(y);
    if !all_finite(&grad) || !fy.is_finite() {
        return Err(OptError::OracleFailure(
            "smooth oracle returned a non-finite value or gradient at the step point".into(),
        ));
    }
    let mut est = est;
    for _ in 0..=MAX_DOUBLINGS {
        let l = est.current();
        let eta = 1.0 / l;
        let shifted: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| yi - eta * gi).collect();
        let x_plus = problem.prox_oracle().prox(&shifted, eta);
        counter.record();
        let diff: Vec<f64> = x_plus.iter().zip(y).map(|(a, b)| a - b).collect();
        let quad = fy + dot(&grad, &diff) + 0.5 * l * dot(&diff, &diff);
        if f.value(&x_plus) <= quad + DESCENT_TEST_SLACK * (1.0 + fy.abs()) {
            let prox_grad: Vec<f64> = y.iter().zip(&x_plus).map(|(yi, pi)| (yi - pi) / eta).collect();
            return Ok((
                ProxGradResult {
                    x_plus,
                    prox_grad,
                    eta,
                    prox_calls: counter.count(),
                },
                est,
            ));
        }
        est.grow();
    }
    Err(OptError::LipschitzSearchFailure {
        doublings: MAX_DOUBLINGS,
        reached: est.current(),
    })
}

/// `||G_eta(x)||_2`; zero (up to the caller's tolerance) iff `x` is optimal.
pub fn prox_gradient_norm(
    problem: &CompositeProblem,
    x: &[f64],
    eta: f64,
    counter: &mut ProxCounter,
) -> Result<f64> {
    Ok(prox_grad_map(problem, x, eta, counter)?.prox_grad_norm())
}
