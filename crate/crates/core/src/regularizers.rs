//! Proximal operators for the regularizers and constraints used by the
//! benchmark problems, plus the augmented proxes the adaptive solvers need.
//!
//! All functions here are pure and allocation-per-call; none of them touch
//! the proximal-call counter. Solvers record the count at the call site.

use crate::problem::{OptError, ProxOracle};
use crate::Result;

/// Soft thresholding: componentwise `sign(v_i) * max(|v_i| - t, 0)`.
///
/// Ties at `|v_i| = t` map to exactly 0.
pub fn prox_l1(v: &[f64], t: f64) -> Vec<f64> {
    debug_assert!(t > 0.0);
    v.iter()
        .map(|&vi| {
            let m = vi.abs() - t;
            if m > 0.0 {
                vi.signum() * m
            } else {
                0.0
            }
        })
        .collect()
}

/// Euclidean projection onto the l1 ball of radius `s`, by full sort and
/// threshold search. Deterministic: no randomized pivoting.
pub fn project_l1_ball(v: &[f64], s: f64) -> Vec<f64> {
    debug_assert!(s > 0.0);
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= s {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - s) / (j as f64 + 1.0);
        if m > candidate {
            tau = candidate;
        } else {
            break;
        }
    }
    v.iter()
        .map(|&vi| {
            let m = vi.abs() - tau;
            if m > 0.0 {
                vi.signum() * m
            } else {
                0.0
            }
        })
        .collect()
}

/// Prox of `t * ||.||_inf` via the Moreau decomposition
/// `prox_{t ||.||_inf}(v) = v - t * project_l1_ball(v / t, 1)`.
pub fn prox_linf(v: &[f64], t: f64) -> Vec<f64> {
    debug_assert!(t > 0.0);
    let scaled: Vec<f64> = v.iter().map(|x| x / t).collect();
    let proj = project_l1_ball(&scaled, 1.0);
    v.iter().zip(&proj).map(|(vi, pi)| vi - t * pi).collect()
}

/// Validates that `boundaries` partitions `[0, dim)` into contiguous
/// groups: strictly increasing group end indices, last one equal to `dim`.
pub fn validate_groups(boundaries: &[usize], dim: usize) -> Result<()> {
    if boundaries.is_empty() || *boundaries.last().unwrap() != dim {
        return Err(OptError::InvalidConfig(format!(
            "group boundaries {boundaries:?} do not cover dimension {dim}"
        )));
    }
    let mut prev = 0usize;
    for &b in boundaries {
        if b <= prev {
            return Err(OptError::InvalidConfig(format!(
                "group boundaries {boundaries:?} are not strictly increasing"
            )));
        }
        prev = b;
    }
    Ok(())
}

/// Prox of `t * sum_groups ||v_group||_inf`: the l1,inf norm is separable
/// across groups, so each group gets an independent l_inf prox.
pub fn prox_l1inf_groups(v: &[f64], t: f64, boundaries: &[usize]) -> Result<Vec<f64>> {
    validate_groups(boundaries, v.len())?;
    let mut out = Vec::with_capacity(v.len());
    let mut start = 0usize;
    for &end in boundaries {
        out.extend(prox_linf(&v[start..end], t));
        start = end;
    }
    Ok(out)
}

/// Prox of `t * sum_i h(v_i)` with `h` the Huber function of width `delta`
/// (quadratic `x^2/2` for `|x| <= delta`, linear `delta |x| - delta^2/2`
/// beyond). Derived by completing the square per region; the boundary
/// `|v_i|/(1+t) = delta` is assigned to the quadratic branch, where the two
/// branches agree.
pub fn prox_huber_norm(v: &[f64], t: f64, delta: f64) -> Vec<f64> {
    debug_assert!(t > 0.0 && delta > 0.0);
    v.iter()
        .map(|&vi| {
            let shrunk = vi / (1.0 + t);
            if shrunk.abs() <= delta {
                shrunk
            } else {
                vi.signum() * (vi.abs() - t * delta)
            }
        })
        .collect()
}

/// Prox of the delta-augmented function `g(x) + (delta/2) ||x - anchor||^2`
/// at step `eta`, reduced to a single call of `g`'s own prox:
/// the quadratic terms fold into
/// `g.prox((u + eta * delta * anchor) / (1 + eta * delta), eta / (1 + eta * delta))`.
pub fn prox_augmented(
    g: &dyn ProxOracle,
    u: &[f64],
    eta: f64,
    delta: f64,
    anchor: &[f64],
) -> Vec<f64> {
    debug_assert!(eta > 0.0 && delta >= 0.0);
    debug_assert_eq!(u.len(), anchor.len());
    let scale = 1.0 + eta * delta;
    let shifted: Vec<f64> = u
        .iter()
        .zip(anchor)
        .map(|(ui, ai)| (ui + eta * delta * ai) / scale)
        .collect();
    g.prox(&shifted, eta / scale)
}

/// Minimizer of the dual-averaging model
/// `0.5 ||x - anchor||^2 + <accumulated_grad, x> + a_sum * (g(x) + (delta/2) ||x - anchor||^2)`.
///
/// Both quadratic terms share the anchor center, so the minimizer is again
/// one prox of `g`: `g.prox(anchor - accumulated_grad / (1 + a_sum * delta),
/// a_sum / (1 + a_sum * delta))`.
pub fn dual_averaging_min(
    g: &dyn ProxOracle,
    accumulated_grad: &[f64],
    a_sum: f64,
    delta: f64,
    anchor: &[f64],
) -> Vec<f64> {
    debug_assert!(a_sum > 0.0 && delta >= 0.0);
    debug_assert_eq!(accumulated_grad.len(), anchor.len());
    let scale = 1.0 + a_sum * delta;
    let shifted: Vec<f64> = anchor
        .iter()
        .zip(accumulated_grad)
        .map(|(ai, gi)| ai - gi / scale)
        .collect();
    g.prox(&shifted, a_sum / scale)
}

/// The zero function: `g = 0`, prox is the identity.
pub struct ZeroProx;

impl ProxOracle for ZeroProx {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn prox(&self, u: &[f64], _eta: f64) -> Vec<f64> {
        u.to_vec()
    }
}

/// Feasibility slack used when evaluating the l1-ball indicator; projection
/// output satisfies the constraint up to this rounding allowance.
pub const L1_BALL_FEASIBILITY_SLACK: f64 = 1e-10;

/// The regularizers of the benchmark suite as one prox oracle.
#[derive(Debug, Clone)]
pub enum RegularizerKind {
    /// `lambda * ||x||_1`
    L1 { lambda: f64 },
    /// `lambda * ||x||_inf`
    Linf { lambda: f64 },
    /// `lambda * sum_groups ||x_group||_inf` over a contiguous partition.
    L1InfGroups { lambda: f64, boundaries: Vec<usize> },
    /// `lambda * sum_i huber_delta(x_i)`
    HuberNorm { lambda: f64, delta: f64 },
    /// Indicator of `||x||_1 <= s`.
    L1Ball { radius: f64 },
    /// `g = 0`
    None,
}

impl RegularizerKind {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            RegularizerKind::L1 { lambda }
            | RegularizerKind::Linf { lambda } => positive(*lambda, "lambda"),
            RegularizerKind::L1InfGroups { lambda, boundaries } => {
                positive(*lambda, "lambda")?;
                validate_groups(boundaries, dim)
            }
            RegularizerKind::HuberNorm { lambda, delta } => {
                positive(*lambda, "lambda")?;
                positive(*delta, "delta")
            }
            RegularizerKind::L1Ball { radius } => positive(*radius, "radius"),
            RegularizerKind::None => Ok(()),
        }
    }
}

fn positive(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(OptError::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ProxOracle for RegularizerKind {
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            RegularizerKind::L1 { lambda } => lambda * x.iter().map(|v| v.abs()).sum::<f64>(),
            RegularizerKind::Linf { lambda } => {
                lambda * x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            RegularizerKind::L1InfGroups { lambda, boundaries } => {
                let mut total = 0.0;
                let mut start = 0usize;
                for &end in boundaries {
                    total += x[start..end].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    start = end;
                }
                lambda * total
            }
            RegularizerKind::HuberNorm { lambda, delta } => {
                lambda
                    * x.iter()
                        .map(|&v| {
                            if v.abs() <= *delta {
                                0.5 * v * v
                            } else {
                                delta * v.abs() - 0.5 * delta * delta
                            }
                        })
                        .sum::<f64>()
            }
            RegularizerKind::L1Ball { radius } => {
                let l1: f64 = x.iter().map(|v| v.abs()).sum();
                if l1 <= radius + L1_BALL_FEASIBILITY_SLACK {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            RegularizerKind::None => 0.0,
        }
    }

    fn prox(&self, u: &[f64], eta: f64) -> Vec<f64> {
        match self {
            RegularizerKind::L1 { lambda } => prox_l1(u, lambda * eta),
            RegularizerKind::Linf { lambda } => prox_linf(u, lambda * eta),
            RegularizerKind::L1InfGroups { lambda, boundaries } => {
                prox_l1inf_groups(u, lambda * eta, boundaries)
                    .expect("group boundaries validated at construction")
            }
            RegularizerKind::HuberNorm { lambda, delta } => {
                prox_huber_norm(u, lambda * eta, *delta)
            }
            RegularizerKind::L1Ball { radius } => project_l1_ball(u, *radius),
            RegularizerKind::None => u.to_vec(),
        }
    }
}
