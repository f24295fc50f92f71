//! Variance-reduced stochastic optimization for finite sums.
//!
//! This crate minimizes averages of `n` smooth (possibly nonconvex) component
//! functions, `f(x) = (1/n) * sum_i f_i(x)`, and measures every algorithm in
//! the same currency: incremental first-order oracle (IFO) calls, i.e.
//! component-gradient evaluations. It provides
//!
//! - [`oracle`]: the finite-sum problem abstraction, IFO accounting, and the
//!   deterministic seeded randomness all optimizers share;
//! - [`problems`]: quadratic / regularized-logistic / one-hidden-layer
//!   perceptron test beds with known constants, plus libsvm and CSV data I/O;
//! - [`optimizers`]: SGD, full gradient descent, SVRG with snapshot epochs
//!   (single-sample and mini-batch), restarted SVRG for gradient-dominated
//!   objectives, and the mixed step-size variant MSVRG;
//! - [`certificates`]: the step-size certificate recursion that validates a
//!   schedule before a run, theoretical schedule constructors, and variance /
//!   gradient-dominance diagnostics;
//! - [`bench`]: a config-driven experiment runner that emits reproducible CSV
//!   artifacts, comparison tables, and convergence-rate fits.
//!
//! Runs are deterministic: equal seeds produce identical run records, and the
//! generator algorithm is recorded in every record and manifest. See the
//! `examples/` directory for one runnable program per capability, and the
//! `svrg-bench` binary for the command-line harness.

// Validations use `!(x > 0.0)` so NaN inputs fail the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod certificates;
pub mod error;
pub mod optimizers;
pub mod oracle;
pub mod problems;

pub use error::{Error, Result};
pub use oracle::{finite_difference_gradient, IfoLedger, Oracle, Problem, RngStream, Vector};
