//! Problem abstraction: smooth and proximal oracles, their composite
//! pairing, and the proximal-call counter every solver reports.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptError {
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("Lipschitz search failed after {doublings} doublings (L = {reached:e}); f may not be smooth")]
    LipschitzSearchFailure { doublings: u32, reached: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Oracle for a differentiable convex function `f`.
///
/// Implementations must be immutable after construction; they are shared
/// across threads by the benchmark harness.
pub trait SmoothOracle: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Upper bound on the gradient's Lipschitz constant, if one is known.
    /// Crude bounds are fine; backtracking refines the working estimate.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }
}

/// Oracle for a proper lower semi-continuous convex function `g` given by
/// its value (possibly `+inf` for indicators) and its proximal mapping
/// `prox(u, eta) = argmin_x 0.5 * ||x - u||^2 + eta * g(x)`.
pub trait ProxOracle: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn prox(&self, u: &[f64], eta: f64) -> Vec<f64>;
}

/// Smooth oracle built from closures; convenient for synthetic problems.
pub struct FnSmooth<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    value: V,
    gradient: G,
    lipschitz: Option<f64>,
}

impl<V, G> FnSmooth<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(value: V, gradient: G, lipschitz: Option<f64>) -> Self {
        FnSmooth {
            value,
            gradient,
            lipschitz,
        }
    }
}

impl<V, G> SmoothOracle for FnSmooth<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
    fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz
    }
}

/// Prox oracle built from closures.
pub struct FnProx<V, P>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    P: Fn(&[f64], f64) -> Vec<f64> + Send + Sync,
{
    value: V,
    prox: P,
}

impl<V, P> FnProx<V, P>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    P: Fn(&[f64], f64) -> Vec<f64> + Send + Sync,
{
    pub fn new(value: V, prox: P) -> Self {
        FnProx { value, prox }
    }
}

impl<V, P> ProxOracle for FnProx<V, P>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    P: Fn(&[f64], f64) -> Vec<f64> + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn prox(&self, u: &[f64], eta: f64) -> Vec<f64> {
        (self.prox)(u, eta)
    }
}

/// The composite objective `F(x) = f(x) + g(x)` every solver consumes.
/// Oracles are immutable and shared; per-run state lives in the solvers.
#[derive(Clone)]
pub struct CompositeProblem {
    f: Arc<dyn SmoothOracle>,
    g: Arc<dyn ProxOracle>,
    dimension: usize,
}

impl CompositeProblem {
    pub fn new(f: Arc<dyn SmoothOracle>, g: Arc<dyn ProxOracle>, dimension: usize) -> Self {
        CompositeProblem { f, g, dimension }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn smooth(&self) -> &dyn SmoothOracle {
        self.f.as_ref()
    }

    pub fn prox_oracle(&self) -> &dyn ProxOracle {
        self.g.as_ref()
    }

    pub fn smooth_arc(&self) -> Arc<dyn SmoothOracle> {
        Arc::clone(&self.f)
    }

    pub fn prox_arc(&self) -> Arc<dyn ProxOracle> {
        Arc::clone(&self.g)
    }

    /// `F(x) = f(x) + g(x)`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.f.value(x) + self.g.value(x)
    }
}

/// Counts invocations of the g-prox. One counter per solver run; the
/// terminal count is the work figure every benchmark reports.
#[derive(Debug, Default, Clone)]
pub struct ProxCounter {
    calls: u64,
}

impl ProxCounter {
    pub fn new() -> Self {
        ProxCounter { calls: 0 }
    }

    /// Record exactly one proximal mapping.
    pub fn record(&mut self) {
        self.calls += 1;
    }

    pub fn count(&self) -> u64 {
        self.calls
    }
}
