//! Smooth empirical losses `f(x) = (1/n) sum_i loss(a_i' x, b_i)` over a
//! sparse dataset, exposed as [`SmoothOracle`] instances.
//!
//! Evaluation is chunked over rows. With the `parallel` feature the chunks
//! run on rayon and partial results are combined in chunk order, so the
//! parallel and sequential paths produce bitwise-identical values.

use std::sync::Arc;

use crate::problem::{OptError, SmoothOracle};
use crate::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per evaluation chunk. Fixed so that the floating-point reduction
/// order never depends on the thread count.
pub const EVAL_CHUNK_ROWS: usize = 1024;

/// Sparse design matrix (CSR) plus a label per row.
///
/// Row indices are strictly increasing within a row and live in `[0, dim)`.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    row_offsets: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    labels: Vec<f64>,
    dim: usize,
}

impl LabeledDataset {
    /// Builds a dataset from per-row `(index, value)` pairs.
    pub fn new(rows: Vec<Vec<(u32, f64)>>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(OptError::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|b| !b.is_finite()) {
            return Err(OptError::NonFinite { context: "dataset labels" });
        }
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_offsets.push(0);
        for row in &rows {
            let mut prev: Option<u32> = None;
            for &(idx, val) in row {
                if (idx as usize) >= dim {
                    return Err(OptError::InvalidConfig(format!(
                        "feature index {idx} out of range for dimension {dim}"
                    )));
                }
                if let Some(p) = prev {
                    if idx <= p {
                        return Err(OptError::InvalidConfig(format!(
                            "feature indices must be strictly increasing within a row (saw {p} then {idx})"
                        )));
                    }
                }
                if !val.is_finite() {
                    return Err(OptError::NonFinite { context: "dataset feature values" });
                }
                prev = Some(idx);
                indices.push(idx);
                values.push(val);
            }
            row_offsets.push(indices.len());
        }
        Ok(LabeledDataset {
            row_offsets,
            indices,
            values,
            labels,
            dim,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `a_i' x` for row `i`.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter()
            .zip(val)
            .map(|(&j, &v)| v * x[j as usize])
            .sum()
    }

    /// Squared Euclidean norm of row `i`.
    pub fn row_norm_sq(&self, i: usize) -> f64 {
        let (_, val) = self.row(i);
        val.iter().map(|v| v * v).sum()
    }

    /// Rebuilds the per-row pair representation (used by serialization and
    /// the scaling transforms).
    pub fn to_rows(&self) -> Vec<Vec<(u32, f64)>> {
        (0..self.n_rows())
            .map(|i| {
                let (idx, val) = self.row(i);
                idx.iter().copied().zip(val.iter().copied()).collect()
            })
            .collect()
    }
}

/// The loss families of the benchmark suite, as functions of the margin
/// `z = a' x` and the label `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// `(z - b)^2`
    Square,
    /// `max(0, 1 - b z)^2`, labels in {-1, +1}
    SquaredHinge,
    /// Huber applied to the residual `z - b`
    Huber { delta: f64 },
    /// `log(1 + exp(-b z))`, labels in {-1, +1}
    Logistic,
    /// `(z - b)^p` for even `p >= 2`
    PowerP { p: u32 },
}

impl LossKind {
    /// Even-degree power loss; odd degrees are not convex and are rejected.
    pub fn power(p: u32) -> Result<Self> {
        if p < 2 || p % 2 != 0 {
            return Err(OptError::InvalidConfig(format!(
                "power loss requires an even exponent >= 2, got {p}"
            )));
        }
        Ok(LossKind::PowerP { p })
    }

    pub fn huber(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(OptError::InvalidConfig(format!(
                "huber loss requires delta > 0, got {delta}"
            )));
        }
        Ok(LossKind::Huber { delta })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LossKind::PowerP { p } => {
                LossKind::power(p)?;
            }
            LossKind::Huber { delta } => {
                LossKind::huber(delta)?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether labels must come from {-1, +1}.
    pub fn is_classification(&self) -> bool {
        matches!(self, LossKind::SquaredHinge | LossKind::Logistic)
    }

    pub fn value(&self, z: f64, b: f64) -> f64 {
        match *self {
            LossKind::Square => (z - b) * (z - b),
            LossKind::SquaredHinge => {
                let m = (1.0 - b * z).max(0.0);
                m * m
            }
            LossKind::Huber { delta } => {
                let r = (z - b).abs();
                if r <= delta {
                    0.5 * r * r
                } else {
                    delta * r - 0.5 * delta * delta
                }
            }
            LossKind::Logistic => {
                // log(1 + exp(-m)) computed without overflow for any m.
                let m = b * z;
                (-m.abs()).exp().ln_1p() + (-m).max(0.0)
            }
            LossKind::PowerP { p } => (z - b).powi(p as i32),
        }
    }

    /// Derivative in `z`; continuous at the Huber and squared-hinge
    /// region boundaries.
    pub fn derivative(&self, z: f64, b: f64) -> f64 {
        match *self {
            LossKind::Square => 2.0 * (z - b),
            LossKind::SquaredHinge => -2.0 * b * (1.0 - b * z).max(0.0),
            LossKind::Huber { delta } => {
                let r = z - b;
                if r.abs() <= delta {
                    r
                } else {
                    delta * r.signum()
                }
            }
            LossKind::Logistic => {
                let m = b * z;
                // -b * sigmoid(-m), stable on both tails
                if m >= 0.0 {
                    let e = (-m).exp();
                    -b * e / (1.0 + e)
                } else {
                    -b / (1.0 + m.exp())
                }
            }
            LossKind::PowerP { p } => f64::from(p) * (z - b).powi(p as i32 - 1),
        }
    }

    /// Curvature bound beta with `|loss'(z1) - loss'(z2)| <= beta |z1 - z2|`.
    /// Absent for the power losses, whose derivative is only locally
    /// Lipschitz; backtracking covers them.
    pub fn curvature_bound(&self) -> Option<f64> {
        match self {
            LossKind::Square | LossKind::SquaredHinge => Some(2.0),
            LossKind::Huber { .. } => Some(1.0),
            LossKind::Logistic => Some(0.25),
            LossKind::PowerP { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossKind::Square => "square",
            LossKind::SquaredHinge => "squared_hinge",
            LossKind::Huber { .. } => "huber",
            LossKind::Logistic => "logistic",
            LossKind::PowerP { .. } => "power",
        }
    }
}

/// `f(x) = (1/n) sum_i loss(a_i' x, b_i)` as a smooth oracle.
pub struct EmpiricalLoss {
    kind: LossKind,
    data: Arc<LabeledDataset>,
    lipschitz: Option<f64>,
}

/// Builds the empirical loss oracle for `kind` over `data`.
///
/// The Lipschitz hint is the crude row-norm bound
/// `(beta / n) * sum_i ||a_i||^2`; backtracking refines it at run time.
pub fn make_empirical_loss(kind: LossKind, data: Arc<LabeledDataset>) -> Result<EmpiricalLoss> {
    kind.validate()?;
    if data.n_rows() == 0 {
        return Err(OptError::InvalidConfig("dataset is empty".into()));
    }
    if kind.is_classification() {
        for &b in data.labels() {
            if b != 1.0 && b != -1.0 {
                return Err(OptError::InvalidConfig(format!(
                    "{} loss requires labels in {{-1, +1}}, found {b}",
                    kind.name()
                )));
            }
        }
    }
    let lipschitz = kind.curvature_bound().map(|beta| {
        let sq_sum: f64 = (0..data.n_rows()).map(|i| data.row_norm_sq(i)).sum();
        beta * sq_sum / data.n_rows() as f64
    });
    Ok(EmpiricalLoss {
        kind,
        data,
        lipschitz,
    })
}

impl EmpiricalLoss {
    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn dataset(&self) -> &LabeledDataset {
        &self.data
    }

    fn chunk_value(&self, rows: std::ops::Range<usize>, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in rows {
            let z = self.data.row_dot(i, x);
            acc += self.kind.value(z, self.data.labels()[i]);
        }
        acc
    }

    fn chunk_gradient(&self, rows: std::ops::Range<usize>, x: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.data.dim()];
        for i in rows {
            let z = self.data.row_dot(i, x);
            let d = self.kind.derivative(z, self.data.labels()[i]);
            let (idx, val) = self.data.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                acc[j as usize] += d * v;
            }
        }
        acc
    }

    fn chunk_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let n = self.data.n_rows();
        (0..n)
            .step_by(EVAL_CHUNK_ROWS)
            .map(|lo| lo..(lo + EVAL_CHUNK_ROWS).min(n))
            .collect()
    }

    /// Sequential reference path; always available and bitwise equal to
    /// the parallel path.
    pub fn value_seq(&self, x: &[f64]) -> f64 {
        let total: f64 = self
            .chunk_ranges()
            .into_iter()
            .map(|r| self.chunk_value(r, x))
            .sum();
        total / self.data.n_rows() as f64
    }

    pub fn gradient_seq(&self, x: &[f64]) -> Vec<f64> {
        let partials: Vec<Vec<f64>> = self
            .chunk_ranges()
            .into_iter()
            .map(|r| self.chunk_gradient(r, x))
            .collect();
        reduce_partials(partials, self.data.dim(), self.data.n_rows())
    }

    #[cfg(feature = "parallel")]
    pub fn value_par(&self, x: &[f64]) -> f64 {
        let partials: Vec<f64> = self
            .chunk_ranges()
            .into_par_iter()
            .map(|r| self.chunk_value(r, x))
            .collect();
        partials.into_iter().sum::<f64>() / self.data.n_rows() as f64
    }

    #[cfg(feature = "parallel")]
    pub fn gradient_par(&self, x: &[f64]) -> Vec<f64> {
        let partials: Vec<Vec<f64>> = self
            .chunk_ranges()
            .into_par_iter()
            .map(|r| self.chunk_gradient(r, x))
            .collect();
        reduce_partials(partials, self.data.dim(), self.data.n_rows())
    }
}

/// Sums per-chunk gradients in chunk order and divides by n.
fn reduce_partials(partials: Vec<Vec<f64>>, dim: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for part in partials {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    let inv_n = 1.0 / n as f64;
    for o in &mut out {
        *o *= inv_n;
    }
    out
}

impl SmoothOracle for EmpiricalLoss {
    fn value(&self, x: &[f64]) -> f64 {
        #[cfg(feature = "parallel")]
        {
            // A single chunk gains nothing from the pool; skip the dispatch.
            if self.data.n_rows() > EVAL_CHUNK_ROWS {
                return self.value_par(x);
            }
        }
        self.value_seq(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        {
            if self.data.n_rows() > EVAL_CHUNK_ROWS {
                return self.gradient_par(x);
            }
        }
        self.gradient_seq(x)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz
    }
}
