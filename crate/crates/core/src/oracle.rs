//! Independent reference computations used by the test suites: brute-force
//! prox minimization, finite-difference gradients, normal-equation least
//! squares, and synthetic problems with known error-bound parameters.
//!
//! Nothing in here shares code with the operators it checks.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::losses::{make_empirical_loss, LabeledDataset, LossKind};
use crate::problem::{CompositeProblem, OptError, ProxOracle, SmoothOracle};
use crate::regularizers::ZeroProx;
use crate::solvers::{pg, EtaPolicy, PgOption, SolverConfig};
use crate::vector::{norm_inf, DenseVector};
use crate::Result;

/// Golden-section tolerance for the 1-D searches.
pub const GOLDEN_TOL: f64 = 1e-8;

/// Search span per the prox oracle contract: the minimizer of
/// `0.5 (x - u)^2 + eta g(x)` for nonexpansive proxes lies well inside
/// `[-10 (1 + ||u||_inf), 10 (1 + ||u||_inf)]`.
pub fn prox_search_span(u: &[f64]) -> f64 {
    10.0 * (1.0 + norm_inf(u))
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Brute-force prox for separable `g`: minimizes
/// `0.5 (x_i - u_i)^2 + eta * g_i(i, x_i)` per coordinate by golden
/// section to [`GOLDEN_TOL`].
pub fn brute_prox_separable(
    g_coord: impl Fn(usize, f64) -> f64,
    u: &[f64],
    eta: f64,
) -> Vec<f64> {
    let span = prox_search_span(u);
    u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let obj = |x: f64| 0.5 * (x - ui) * (x - ui) + eta * g_coord(i, x);
            golden_section_min(obj, -span, span, GOLDEN_TOL)
        })
        .collect()
}

/// Joint grid minimization over a box, refined by repeated zooming.
/// Handles `+inf` objective values (indicators). The window keeps a
/// two-cell margin around the incumbent, so for coordinate-convex
/// objectives the minimizer never escapes a zoom round.
pub fn joint_grid_min(
    obj: impl Fn(&[f64]) -> f64,
    center: &[f64],
    halfwidth: f64,
    rounds: usize,
) -> Vec<f64> {
    let d = center.len();
    assert!(d >= 1 && d <= 2, "joint grid supports 1-D and 2-D only");
    const GRID: usize = 41;
    let mut center = center.to_vec();
    let mut hw = halfwidth;
    let mut best = center.clone();
    let mut best_val = f64::INFINITY;
    for _ in 0..rounds {
        let cell = 2.0 * hw / (GRID - 1) as f64;
        let coord = |c: f64, i: usize| c - hw + cell * i as f64;
        if d == 1 {
            for i in 0..GRID {
                let x = [coord(center[0], i)];
                let v = obj(&x);
                if v < best_val {
                    best_val = v;
                    best = x.to_vec();
                }
            }
        } else {
            for i in 0..GRID {
                for j in 0..GRID {
                    let x = [coord(center[0], i), coord(center[1], j)];
                    let v = obj(&x);
                    if v < best_val {
                        best_val = v;
                        best = x.to_vec();
                    }
                }
            }
        }
        center = best.clone();
        hw = 2.0 * cell;
    }
    best
}

/// Brute-force prox for a joint (possibly non-separable) `g` in up to two
/// dimensions: dense grid refinement of `0.5 ||x - u||^2 + eta g(x)`.
pub fn brute_prox(g_value: impl Fn(&[f64]) -> f64, u: &[f64], eta: f64) -> Result<Vec<f64>> {
    if u.is_empty() || u.len() > 2 {
        return Err(OptError::InvalidConfig(format!(
            "brute_prox joint grid handles d in {{1, 2}}, got {} (use brute_prox_separable)",
            u.len()
        )));
    }
    let obj = |x: &[f64]| {
        let sq: f64 = x.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum();
        0.5 * sq + eta * g_value(x)
    };
    Ok(joint_grid_min(obj, &vec![0.0; u.len()], prox_search_span(u), 14))
}

/// Central-difference gradient with the scale-aware step
/// `h = 1e-6 * (1 + ||x||_inf)`.
pub fn fd_gradient(f: &dyn SmoothOracle, x: &[f64]) -> Vec<f64> {
    let h = 1e-6 * (1.0 + norm_inf(x));
    let mut out = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f.value(&probe);
        probe[i] = x[i] - h;
        let fm = f.value(&probe);
        probe[i] = x[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

/// Largest relative deviation between the oracle gradient and central
/// finite differences at `x`.
pub fn max_gradient_deviation(f: &dyn SmoothOracle, x: &[f64]) -> f64 {
    let g = f.gradient(x);
    let fd = fd_gradient(f, x);
    let scale = 1.0f64.max(crate::vector::norm2(&g));
    g.iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max)
}

/// `f(x) = 0.5 * sum_i q_i x_i^2` with known spectrum.
pub struct DiagQuadratic {
    pub diag: Vec<f64>,
}

impl SmoothOracle for DiagQuadratic {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.diag.iter().zip(x).map(|(q, v)| q * v * v).sum::<f64>()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.diag.iter().zip(x).map(|(q, v)| q * v).collect()
    }
    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.diag.iter().fold(0.0f64, |m, &q| m.max(q)))
    }
}

/// `g(x) = (alpha/2) ||x||^2` with its closed-form prox; the strongly
/// convex part used when exercising the dual gradient method.
pub struct SquaredNormProx {
    pub alpha: f64,
}

impl ProxOracle for SquaredNormProx {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.alpha * x.iter().map(|v| v * v).sum::<f64>()
    }
    fn prox(&self, u: &[f64], eta: f64) -> Vec<f64> {
        u.iter().map(|v| v / (1.0 + eta * self.alpha)).collect()
    }
}

/// `F(x) = (1/d) sum_i x_i^p` for even `p`.
pub struct PowerObjective {
    pub p: u32,
    pub dim: usize,
}

impl SmoothOracle for PowerObjective {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.powi(self.p as i32)).sum::<f64>() / self.dim as f64
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let scale = self.p as f64 / self.dim as f64;
        x.iter().map(|v| scale * v.powi(self.p as i32 - 1)).collect()
    }
    fn lipschitz_hint(&self) -> Option<f64> {
        if self.p == 2 {
            Some(2.0 / self.dim as f64)
        } else {
            None
        }
    }
}

/// A synthetic problem whose error-bound parameters are known (or fitted).
pub struct SyntheticHeb {
    pub problem: CompositeProblem,
    pub theta_true: f64,
    pub c_true: f64,
    pub optimum: Vec<f64>,
    pub f_star: f64,
}

/// `f(x) = 0.5 x' diag(alpha, ..., l) x`: error-bound exponent 1/2 with
/// constant `sqrt(1/alpha)` (the quadratic-growth convention; the bound
/// with this constant is tight up to a factor sqrt(2)).
pub fn make_quadratic_heb(alpha: f64, l: f64, d: usize) -> Result<SyntheticHeb> {
    if !(alpha > 0.0 && alpha <= l) || d == 0 {
        return Err(OptError::InvalidConfig(format!(
            "need 0 < alpha <= l and d >= 1, got alpha = {alpha}, l = {l}, d = {d}"
        )));
    }
    let diag: Vec<f64> = if d == 1 {
        vec![alpha]
    } else {
        (0..d)
            .map(|i| alpha + (l - alpha) * i as f64 / (d - 1) as f64)
            .collect()
    };
    let problem = CompositeProblem::new(Arc::new(DiagQuadratic { diag }), Arc::new(ZeroProx), d);
    Ok(SyntheticHeb {
        problem,
        theta_true: 0.5,
        c_true: (1.0 / alpha).sqrt(),
        optimum: vec![0.0; d],
        f_star: 0.0,
    })
}

/// `F(x) = (1/d) sum_i x_i^p`: exponent `1/p`, with the constant fitted by
/// maximizing `||x|| / F(x)^(1/p)` over a direction grid (the ratio is
/// radius-free for this family). The grid includes the coordinate axes and
/// the uniform direction, which attains the maximum `sqrt(d)` exactly.
pub fn make_power_heb(p: u32, d: usize) -> Result<SyntheticHeb> {
    LossKind::power(p)?;
    if d == 0 {
        return Err(OptError::InvalidConfig("d must be >= 1".into()));
    }
    let f = PowerObjective { p, dim: d };
    let theta = 1.0 / f64::from(p);
    let mut c_fit: f64 = 0.0;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        dirs.push(e);
    }
    dirs.push(vec![1.0 / (d as f64).sqrt(); d]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
    for _ in 0..200 {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = crate::vector::norm2(&v);
        if n > 0.0 {
            for vi in &mut v {
                *vi /= n;
            }
            dirs.push(v);
        }
    }
    for dir in &dirs {
        let val = f.value(dir);
        if val > 0.0 {
            c_fit = c_fit.max(1.0 / val.powf(theta));
        }
    }
    let problem = CompositeProblem::new(Arc::new(PowerObjective { p, dim: d }), Arc::new(ZeroProx), d);
    Ok(SyntheticHeb {
        problem,
        theta_true: theta,
        c_true: c_fit,
        optimum: vec![0.0; d],
        f_star: 0.0,
    })
}

/// Dense symmetric positive-definite solve via Cholesky; adds a 1e-12
/// ridge and retries when the factorization hits a non-positive pivot.
fn spd_solve(mut a: Vec<Vec<f64>>, b: &[f64]) -> Vec<f64> {
    let d = b.len();
    let mut attempt = 0;
    loop {
        match cholesky(&a) {
            Some(l) => return cholesky_solve(&l, b),
            None => {
                attempt += 1;
                let ridge = 1e-12 * 10f64.powi(attempt);
                for (i, row) in a.iter_mut().enumerate().take(d) {
                    row[i] += ridge;
                }
                assert!(attempt < 20, "Cholesky failed even with ridge");
            }
        }
    }
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let d = b.len();
    let mut y = vec![0.0; d];
    for i in 0..d {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut sum = y[i];
        for k in i + 1..d {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    x
}

/// Reference solution of the empirical square-loss problem
/// `(1/n) sum_i (a_i' x - b_i)^2` by normal equations (dense Cholesky with
/// a tiny ridge fallback for singular systems). Returns `(x*, f*)`.
pub fn least_squares_reference(data: &LabeledDataset) -> Result<(Vec<f64>, f64)> {
    let d = data.dim();
    let n = data.n_rows();
    if n == 0 || d == 0 {
        return Err(OptError::InvalidConfig("empty least-squares system".into()));
    }
    let mut ata = vec![vec![0.0; d]; d];
    let mut atb = vec![0.0; d];
    for i in 0..n {
        let (idx, val) = data.row(i);
        for (&j1, &v1) in idx.iter().zip(val) {
            atb[j1 as usize] += v1 * data.labels()[i];
            for (&j2, &v2) in idx.iter().zip(val) {
                ata[j1 as usize][j2 as usize] += v1 * v2;
            }
        }
    }
    let x = spd_solve(ata, &atb);
    let loss = make_empirical_loss(LossKind::Square, Arc::new(data.clone()))?;
    let f_star = loss.value(&x);
    Ok((x, f_star))
}

/// High-precision reference for problems without a closed form: proximal
/// gradient driven to `||G|| <= 1e-12` under a large budget. Errors if the
/// budget runs out before that.
pub fn high_precision_reference(
    problem: &CompositeProblem,
    x0: &DenseVector,
) -> Result<(Vec<f64>, f64)> {
    let config = SolverConfig::new(1e-12)
        .with_budget(50_000_000)
        .with_eta(EtaPolicy::Backtracking)
        .with_record_every(0);
    let trace = pg(problem, x0, &config, PgOption::I)?;
    if !trace.converged() {
        return Err(OptError::OracleFailure(
            "high-precision reference solve did not reach 1e-12".into(),
        ));
    }
    let obj = trace.final_objective;
    Ok((trace.final_x.into_vec(), obj))
}

/// Deterministic regression dataset with strongly correlated features
/// (latent-factor design), the shape of the small regression benchmarks.
/// Features and labels are scaled to `[-1, 1]`.
pub fn synthetic_correlated_regression(
    seed: u64,
    n: usize,
    d: usize,
    latent: usize,
    noise: f64,
) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![vec![0.0; latent]; d];
    for row in &mut w {
        for v in row.iter_mut() {
            *v = rng.sample::<f64, _>(StandardNormal) / (latent as f64).sqrt();
        }
    }
    let mut features = vec![vec![0.0; d]; n];
    for feat in &mut features {
        let z: Vec<f64> = (0..latent).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for (j, fj) in feat.iter_mut().enumerate() {
            let mut v = noise * rng.sample::<f64, _>(StandardNormal);
            for (k, zk) in z.iter().enumerate() {
                v += w[j][k] * zk;
            }
            *fj = v;
        }
    }
    // column-wise scale to [-1, 1]
    for j in 0..d {
        let m = features.iter().map(|r| r[j].abs()).fold(0.0f64, f64::max);
        if m > 0.0 {
            for feat in &mut features {
                feat[j] /= m;
            }
        }
    }
    // sparse ground truth + mild label noise, then scale labels to [-1, 1]
    let truth: Vec<f64> = (0..d)
        .map(|j| if j % 3 == 0 { if j % 2 == 0 { 1.0 } else { -1.0 } } else { 0.0 })
        .collect();
    let mut labels: Vec<f64> = features
        .iter()
        .map(|feat| {
            let dot: f64 = feat.iter().zip(&truth).map(|(a, b)| a * b).sum();
            dot + 0.05 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let m = labels.iter().map(|b| b.abs()).fold(0.0f64, f64::max);
    if m > 0.0 {
        for b in &mut labels {
            *b /= m;
        }
    }
    let rows: Vec<Vec<(u32, f64)>> = features
        .iter()
        .map(|feat| feat.iter().enumerate().map(|(j, &v)| (j as u32, v)).collect())
        .collect();
    LabeledDataset::new(rows, labels, d).expect("generated dataset is valid")
}

/// Regression benchmark dataset: one dominant latent factor makes every
/// column nearly collinear (pairwise correlations close to 1), and the
/// generating coefficients put large opposing weights on column pairs, so
/// recovering them forces large coefficients along the flat directions.
/// This is the geometry of the small ill-conditioned regression sets the
/// benchmark tables are built on.
pub fn synthetic_collinear_regression(
    seed: u64,
    n: usize,
    d: usize,
    noise: f64,
    truth_scale: f64,
) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = vec![vec![0.0; d]; n];
    let col_sign: Vec<f64> = (0..d).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let col_scale: Vec<f64> = (0..d).map(|_| rng.gen_range(0.6..1.4)).collect();
    for feat in &mut features {
        let z: f64 = rng.sample(StandardNormal);
        for (j, fj) in feat.iter_mut().enumerate() {
            *fj = col_sign[j] * col_scale[j] * z + noise * rng.sample::<f64, _>(StandardNormal);
        }
    }
    for j in 0..d {
        let m = features.iter().map(|r| r[j].abs()).fold(0.0f64, f64::max);
        if m > 0.0 {
            for feat in &mut features {
                feat[j] /= m;
            }
        }
    }
    // Pair weights oppose the columns' shared-factor contributions, so
    // the factor cancels out of the labels: labels stay O(1) although
    // recovering them demands O(truth_scale) coefficients along the flat
    // directions. One modest aligned weight keeps the labels correlated
    // with the factor (the gradient at the origin stays O(1)).
    let mut truth = vec![0.0; d];
    if d >= 2 {
        truth[0] = truth_scale * col_sign[0];
        truth[1] = -truth_scale * col_sign[1];
    }
    if d >= 4 {
        truth[2] = truth_scale / 3.0 * col_sign[2];
        truth[3] = -truth_scale / 3.0 * col_sign[3];
    }
    if d >= 5 {
        truth[4] = 0.5 * col_sign[4];
    }
    for (j, t) in truth.iter_mut().enumerate().skip(5) {
        if j % 3 == 0 {
            *t = if j % 2 == 0 { 0.3 } else { -0.3 };
        }
    }
    let labels: Vec<f64> = features
        .iter()
        .map(|feat| {
            let dot: f64 = feat.iter().zip(&truth).map(|(a, b)| a * b).sum();
            dot + 0.05 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let rows: Vec<Vec<(u32, f64)>> = features
        .iter()
        .map(|feat| feat.iter().enumerate().map(|(j, &v)| (j as u32, v)).collect())
        .collect();
    LabeledDataset::new(rows, labels, d).expect("generated dataset is valid")
}
