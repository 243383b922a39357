//! Composite convex optimization toolkit.
//!
//! Solves `min F(x) = f(x) + g(x)` where `f` is smooth with Lipschitz
//! gradient and `g` admits a cheap proximal mapping. The crate provides:
//!
//! - the proximal-gradient map and backtracking Lipschitz search ([`step`]),
//! - empirical losses over sparse data ([`losses`]) and prox operators for
//!   common regularizers and constraints ([`regularizers`]),
//! - first-order solvers: proximal gradient (two return options), accelerated
//!   proximal gradient with and without restarting, accelerated dual gradient,
//!   and adaptive accelerated gradient converging methods that search for the
//!   unknown error-bound constant at runtime ([`solvers`]),
//! - brute-force and closed-form reference computations for testing
//!   ([`oracle`]), and a LibSVM-format parser ([`data`]).
//!
//! Every invocation of a proximal mapping is counted; the counts are the
//! unit of work reported by all benchmarks. All solvers are deterministic:
//! the same problem and configuration always produce the same iterates and
//! the same counts, regardless of thread count.
//!
//! With the `parallel` feature (on by default), empirical loss evaluation
//! uses rayon over fixed-size row chunks; the chunked reduction order is
//! identical to the sequential path, so results are bitwise equal.

pub mod data;
pub mod losses;
pub mod oracle;
pub mod problem;
pub mod regularizers;
pub mod solvers;
pub mod step;
pub mod vector;

pub use problem::{
    CompositeProblem, FnProx, FnSmooth, OptError, ProxCounter, ProxOracle, SmoothOracle,
};
pub use step::{backtrack_step, prox_grad_map, prox_gradient_norm, LipschitzEstimate, ProxGradResult};
pub use vector::DenseVector;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, OptError>;
