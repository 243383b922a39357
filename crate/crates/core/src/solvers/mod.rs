//! First-order solvers with proximal-call accounting.
//!
//! Every solver returns a [`RunTrace`]: per-iteration history, stage and
//! restart events, terminal status, and the cumulative proximal-call count
//! that all benchmarks report. Solvers are single-threaded and
//! deterministic; run several of them concurrently on shared immutable
//! problems if you want parallelism.

mod adaagc;
mod adg;
mod apg;
mod pg;

pub use adaagc::{adaagc_composite, adaagc_smooth};
pub use adg::{adg, adg_coefficient, AdgState};
pub use apg::{apg, rapg, sc_apg_step_sequence};
pub use pg::{pg, PgOption};

use crate::problem::{CompositeProblem, OptError, ProxCounter};
use crate::step::{backtrack_step, prox_grad_map, LipschitzEstimate, ProxGradResult};
use crate::vector::DenseVector;
use crate::Result;

/// Step-size policy shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaPolicy {
    /// Constant step `eta = 1/l` with a caller-supplied smoothness bound.
    Fixed { l: f64 },
    /// Backtracking search: the working constant starts at the oracle's
    /// Lipschitz hint (or 1.0) and doubles until the descent condition
    /// holds; it never decreases within a run.
    Backtracking,
}

/// Hölderian error bound parameters driving the adaptive solvers:
/// exponent `theta`, initial constant estimate `c0`, and the growth
/// factor `gamma` applied on every conditional restart.
#[derive(Debug, Clone, Copy)]
pub struct HebParams {
    pub theta: f64,
    pub c0: f64,
    pub gamma: f64,
}

impl HebParams {
    pub fn new(theta: f64, c0: f64, gamma: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(OptError::InvalidConfig(format!(
                "theta must lie in (0, 1], got {theta}"
            )));
        }
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(OptError::InvalidConfig(format!("c0 must be positive, got {c0}")));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(OptError::InvalidConfig(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        Ok(HebParams { theta, c0, gamma })
    }
}

/// Default proximal-call budget; comfortably above every benchmark count.
pub const DEFAULT_MAX_PROX_CALLS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Stop once the optimality measure drops to this value. For `pg`,
    /// `apg` and the adaAGC variants the measure is the proximal-gradient
    /// norm; for `rapg` it is the (uncheckable) objective gap driving the
    /// stage schedule.
    pub target_eps: f64,
    /// Hard cap on counted proximal mappings.
    pub max_prox_calls: u64,
    pub eta_policy: EtaPolicy,
    /// Record one iteration row every this many iterations (1 = all,
    /// 0 = none). Stage events are always recorded.
    pub record_every: u64,
}

impl SolverConfig {
    pub fn new(target_eps: f64) -> Self {
        SolverConfig {
            target_eps,
            max_prox_calls: DEFAULT_MAX_PROX_CALLS,
            eta_policy: EtaPolicy::Backtracking,
            record_every: 1,
        }
    }

    pub fn with_eta(mut self, policy: EtaPolicy) -> Self {
        self.eta_policy = policy;
        self
    }

    pub fn with_budget(mut self, max_prox_calls: u64) -> Self {
        self.max_prox_calls = max_prox_calls;
        self
    }

    pub fn with_record_every(mut self, record_every: u64) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_eps > 0.0) || !self.target_eps.is_finite() {
            return Err(OptError::InvalidConfig(format!(
                "target_eps must be positive and finite, got {}",
                self.target_eps
            )));
        }
        if self.max_prox_calls == 0 {
            return Err(OptError::InvalidConfig("max_prox_calls must be at least 1".into()));
        }
        if let EtaPolicy::Fixed { l } = self.eta_policy {
            if !(l > 0.0 && l.is_finite()) {
                return Err(OptError::InvalidConfig(format!(
                    "fixed step policy needs a positive finite l, got {l}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    /// The stop test was met, or a fixed-schedule solver (`rapg`, `adg`)
    /// completed its prescribed stages.
    Converged,
    BudgetExhausted,
    /// Not produced by the solvers themselves (they return hard errors);
    /// used by the benchmark harness to record a failed cell.
    Failed,
}

impl TerminalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::BudgetExhausted => "budget_exhausted",
            TerminalStatus::Failed => "failed",
        }
    }
}

/// One per-iteration trace row.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub iteration: u64,
    /// Objective at the iterate produced by this iteration.
    pub objective: f64,
    /// The optimality measure computed during this iteration (see each
    /// solver's documentation for the exact point it refers to).
    pub prox_grad_norm: f64,
    /// Cumulative counted proximal mappings after this iteration.
    pub prox_calls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageEventKind {
    /// A restart cycle started (stage `k`, cycle `s`) with the recorded
    /// `delta` and `c_e`.
    CycleStart,
    /// The inner budget ran out before the norm halved; `c_e` was grown.
    ConditionalRestart,
    /// The norm halved; `eps` records the new stage target `eps_k`.
    StageAdvance,
}

#[derive(Debug, Clone, Copy)]
pub struct StageEvent {
    pub kind: StageEventKind,
    pub stage: u64,
    pub restart: u64,
    /// Total inner-iteration count when the event fired (matches the
    /// `iteration` field of trace records).
    pub iteration: u64,
    /// Regularization delta_k of the cycle (adaptive solvers only).
    pub delta: Option<f64>,
    /// Error-bound constant estimate when the event fired.
    pub c_e: Option<f64>,
    /// `eps_{k-1}` at CycleStart and ConditionalRestart; `eps_k` at
    /// StageAdvance. Always halves across consecutive StageAdvance events.
    pub eps: f64,
    /// Optimality measure that triggered a StageAdvance.
    pub measured_norm: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub events: Vec<StageEvent>,
    pub status: TerminalStatus,
    pub final_x: DenseVector,
    pub final_objective: f64,
    /// Last measured optimality norm. For `Converged` runs of `pg`, `apg`
    /// and adaAGC this is the certificate `<= target_eps`; for `rapg` and
    /// `adg` it is informational.
    pub final_grad_norm: f64,
    pub prox_calls: u64,
    pub iterations: u64,
}

impl RunTrace {
    pub fn converged(&self) -> bool {
        self.status == TerminalStatus::Converged
    }

    pub fn stage_advances(&self) -> impl Iterator<Item = &StageEvent> {
        self.events
            .iter()
            .filter(|e| e.kind == StageEventKind::StageAdvance)
    }

    pub fn conditional_restarts(&self) -> impl Iterator<Item = &StageEvent> {
        self.events
            .iter()
            .filter(|e| e.kind == StageEventKind::ConditionalRestart)
    }

    pub fn cycle_starts(&self) -> impl Iterator<Item = &StageEvent> {
        self.events
            .iter()
            .filter(|e| e.kind == StageEventKind::CycleStart)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }
}

/// Internal per-run trace builder.
pub(crate) struct TraceBuilder {
    records: Vec<IterationRecord>,
    events: Vec<StageEvent>,
    record_every: u64,
}

impl TraceBuilder {
    pub(crate) fn new(record_every: u64) -> Self {
        TraceBuilder {
            records: Vec::new(),
            events: Vec::new(),
            record_every,
        }
    }

    pub(crate) fn recording(&self) -> bool {
        self.record_every > 0
    }

    pub(crate) fn record(&mut self, iteration: u64, objective: f64, norm: f64, calls: u64) {
        if self.record_every > 0 && iteration % self.record_every == 0 {
            self.records.push(IterationRecord {
                iteration,
                objective,
                prox_grad_norm: norm,
                prox_calls: calls,
            });
        }
    }

    pub(crate) fn event(&mut self, event: StageEvent) {
        self.events.push(event);
    }

    pub(crate) fn finish(
        self,
        status: TerminalStatus,
        final_x: Vec<f64>,
        final_objective: f64,
        final_grad_norm: f64,
        counter: &ProxCounter,
        iterations: u64,
    ) -> RunTrace {
        RunTrace {
            records: self.records,
            events: self.events,
            status,
            final_x: DenseVector::new(final_x).unwrap_or_else(|_| DenseVector::zeros(0)),
            final_objective,
            final_grad_norm,
            prox_calls: counter.count(),
            iterations,
        }
    }
}

/// Step-size control shared by the solver loops: either a frozen constant
/// or a monotone backtracked estimate.
pub(crate) struct Stepper {
    est: LipschitzEstimate,
    adaptive: bool,
}

impl Stepper {
    pub(crate) fn new(policy: EtaPolicy, hint: Option<f64>) -> Result<Self> {
        match policy {
            EtaPolicy::Fixed { l } => Ok(Stepper {
                est: LipschitzEstimate::new(l, 2.0)?,
                adaptive: false,
            }),
            EtaPolicy::Backtracking => Ok(Stepper {
                est: LipschitzEstimate::from_hint(hint),
                adaptive: true,
            }),
        }
    }

    pub(crate) fn l(&self) -> f64 {
        self.est.current()
    }

    pub(crate) fn adaptive(&self) -> bool {
        self.adaptive
    }

    pub(crate) fn grow(&mut self) {
        self.est.raise_to(self.est.current() * self.est.factor());
    }

    /// One proximal-gradient step from `y` under the policy.
    pub(crate) fn step(
        &mut self,
        problem: &CompositeProblem,
        y: &[f64],
        counter: &mut ProxCounter,
    ) -> Result<ProxGradResult> {
        if self.adaptive {
            let (result, est) = backtrack_step(problem, y, self.est, counter)?;
            self.est = est;
            Ok(result)
        } else {
            prox_grad_map(problem, y, 1.0 / self.est.current(), counter)
        }
    }
}

pub(crate) fn check_dimension(problem: &CompositeProblem, x0: &DenseVector) -> Result<()> {
    if problem.dimension() != x0.len() {
        return Err(OptError::DimensionMismatch {
            expected: problem.dimension(),
            got: x0.len(),
        });
    }
    Ok(())
}
