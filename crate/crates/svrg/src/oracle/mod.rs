//! Finite-sum problem abstraction and incremental first-order oracle (IFO)
//! accounting.
//!
//! A problem is an average of `n` component functions,
//! `f(x) = (1/n) * sum_i f_i(x)` over `R^d`. Optimizers only touch components
//! through an [`Oracle`], which charges one IFO unit per component-gradient
//! evaluation on its [`IfoLedger`]; a full gradient therefore costs exactly
//! `n` units. Instrumentation (objective values and gradient norms recorded at
//! checkpoints) goes through the uncounted [`Problem`] methods instead, so
//! measurement never perturbs the cost accounting or the iterate sequence.

mod rng;
mod vector;

pub use rng::{RngStream, RNG_ALGORITHM};
pub use vector::Vector;

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// A finite-sum instance: `n` components over a fixed dimension `d`, each
/// smooth with a shared Lipschitz constant for the component gradients.
///
/// Implementations must be pure in `(i, x)` so that evaluations at distinct
/// indices may run concurrently, and immutable after construction.
pub trait Problem: Sync {
    /// Number of components `n`.
    fn num_components(&self) -> usize;

    /// Ambient dimension `d`.
    fn dim(&self) -> usize;

    fn component_value(&self, i: usize, x: &Vector) -> f64;

    fn component_gradient_into(&self, i: usize, x: &Vector, out: &mut Vector);

    /// Lipschitz constant of every component gradient.
    fn smoothness(&self) -> f64;

    /// Uniform bound on component gradient norms, when one is known.
    fn sigma_bound(&self) -> Option<f64> {
        None
    }

    /// Exact optimal value, when known (closed-form instances).
    fn f_star(&self) -> Option<f64> {
        None
    }

    /// A lower bound on `f`, for step-size rules that need `f(x0) - f*`.
    /// Nonnegative losses return 0.
    fn f_star_lower_bound(&self) -> Option<f64> {
        None
    }

    fn component_gradient(&self, i: usize, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        self.component_gradient_into(i, x, &mut out);
        out
    }

    /// Objective value `f(x)`; uncounted instrumentation.
    fn value(&self, x: &Vector) -> f64 {
        let n = self.num_components();
        let sum: f64 = (0..n).map(|i| self.component_value(i, x)).sum();
        sum / n as f64
    }

    /// Full gradient without touching any ledger; uncounted instrumentation.
    fn full_gradient_uncounted(&self, x: &Vector) -> Vector {
        let n = self.num_components();
        let mut acc = Vector::zeros(self.dim());
        let mut buf = Vector::zeros(self.dim());
        for i in 0..n {
            self.component_gradient_into(i, x, &mut buf);
            acc.axpy(1.0, &buf);
        }
        acc.scale(1.0 / n as f64);
        acc
    }

    /// `||grad f(x)||^2`; uncounted instrumentation.
    fn grad_norm_sq(&self, x: &Vector) -> f64 {
        self.full_gradient_uncounted(x).norm_sq()
    }
}

/// Monotone counter of component-gradient evaluations. One full-gradient
/// evaluation costs exactly `n` units. Increments are atomic so component
/// evaluations may proceed concurrently.
#[derive(Debug, Default)]
pub struct IfoLedger(AtomicU64);

impl IfoLedger {
    pub fn new() -> Self {
        IfoLedger(AtomicU64::new(0))
    }

    pub fn count(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn add(&self, units: u64) {
        self.0.fetch_add(units, Ordering::Relaxed);
    }
}

/// A problem with an attached ledger: the only path optimizers use to read
/// gradients, so every algorithm is billed identically.
pub struct Oracle<'p> {
    problem: &'p dyn Problem,
    ledger: IfoLedger,
}

impl<'p> Oracle<'p> {
    pub fn new(problem: &'p dyn Problem) -> Self {
        Oracle {
            problem,
            ledger: IfoLedger::new(),
        }
    }

    pub fn problem(&self) -> &'p dyn Problem {
        self.problem
    }

    pub fn num_components(&self) -> usize {
        self.problem.num_components()
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn smoothness(&self) -> f64 {
        self.problem.smoothness()
    }

    pub fn ifo_count(&self) -> u64 {
        self.ledger.count()
    }

    /// Effective passes through the data: IFO calls divided by `n`.
    pub fn effective_passes(&self) -> f64 {
        self.ledger.count() as f64 / self.num_components() as f64
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        Ok(())
    }

    /// Component gradient; charges one IFO unit.
    pub fn component_gradient_into(&self, i: usize, x: &Vector, out: &mut Vector) -> Result<()> {
        self.check_dim(x)?;
        self.problem.component_gradient_into(i, x, out);
        self.ledger.add(1);
        Ok(())
    }

    pub fn component_gradient(&self, i: usize, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.dim());
        self.component_gradient_into(i, x, &mut out)?;
        Ok(out)
    }

    /// Full gradient `(1/n) * sum_i grad f_i(x)`; charges exactly `n` units.
    ///
    /// Components are accumulated in index order, and each component gradient
    /// is checked for non-finite entries so a numeric failure names the
    /// offending component.
    pub fn full_gradient_into(&self, x: &Vector, out: &mut Vector) -> Result<()> {
        self.check_dim(x)?;
        let n = self.num_components();
        out.fill(0.0);
        let mut buf = Vector::zeros(self.dim());
        for i in 0..n {
            self.problem.component_gradient_into(i, x, &mut buf);
            if !buf.is_finite() {
                return Err(Error::NonFiniteGradient { component: i });
            }
            out.axpy(1.0, &buf);
        }
        out.scale(1.0 / n as f64);
        self.ledger.add(n as u64);
        Ok(())
    }

    pub fn full_gradient(&self, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.dim());
        self.full_gradient_into(x, &mut out)?;
        Ok(out)
    }
}

/// Central-difference estimate of the full gradient. Test and diagnostic use
/// only; never touches any ledger.
///
/// Step size `h` must be positive; `1e-6 * (1 + ||x||)` is a good default.
pub fn finite_difference_gradient(problem: &dyn Problem, x: &Vector, h: f64) -> Result<Vector> {
    if !(h > 0.0) {
        return Err(Error::contract(format!(
            "finite difference step must be positive, got {h}"
        )));
    }
    if x.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            actual: x.dim(),
        });
    }
    let mut grad = Vector::zeros(x.dim());
    let mut probe = x.clone();
    for j in 0..x.dim() {
        let xj = x[j];
        probe[j] = xj + h;
        let plus = problem.value(&probe);
        probe[j] = xj - h;
        let minus = problem.value(&probe);
        probe[j] = xj;
        grad[j] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f_i(x) = (a_i / 2) x^2 in one dimension.
    struct ScalarQuadratic {
        coeffs: Vec<f64>,
    }

    impl Problem for ScalarQuadratic {
        fn num_components(&self) -> usize {
            self.coeffs.len()
        }
        fn dim(&self) -> usize {
            1
        }
        fn component_value(&self, i: usize, x: &Vector) -> f64 {
            0.5 * self.coeffs[i] * x[0] * x[0]
        }
        fn component_gradient_into(&self, i: usize, x: &Vector, out: &mut Vector) {
            out[0] = self.coeffs[i] * x[0];
        }
        fn smoothness(&self) -> f64 {
            self.coeffs.iter().fold(0.0, |m: f64, &a| m.max(a))
        }
    }

    #[test]
    fn full_gradient_is_mean_of_linear_gradients() {
        let p = ScalarQuadratic { coeffs: vec![1.0, 3.0] };
        let oracle = Oracle::new(&p);
        let g = oracle.full_gradient(&Vector::from_vec(vec![2.0])).unwrap();
        // components give 2 and 6; the mean is 4
        assert_eq!(g[0], 4.0);
        assert_eq!(oracle.ifo_count(), 2);
    }

    #[test]
    fn full_gradient_vanishes_at_stationary_point() {
        let p = ScalarQuadratic { coeffs: vec![1.0, 3.0, 0.5] };
        let oracle = Oracle::new(&p);
        let g = oracle.full_gradient(&Vector::zeros(1)).unwrap();
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn ledger_counts_n_per_full_gradient() {
        let p = ScalarQuadratic { coeffs: vec![1.0; 7] };
        let oracle = Oracle::new(&p);
        let x = Vector::from_vec(vec![1.5]);
        oracle.full_gradient(&x).unwrap();
        oracle.full_gradient(&x).unwrap();
        oracle.component_gradient(3, &x).unwrap();
        assert_eq!(oracle.ifo_count(), 15);
        assert!((oracle.effective_passes() - 15.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = ScalarQuadratic { coeffs: vec![1.0] };
        let oracle = Oracle::new(&p);
        let err = oracle.full_gradient(&Vector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, actual: 2 }));
    }

    #[test]
    fn non_finite_gradient_names_component() {
        struct Bad;
        impl Problem for Bad {
            fn num_components(&self) -> usize {
                3
            }
            fn dim(&self) -> usize {
                1
            }
            fn component_value(&self, _i: usize, _x: &Vector) -> f64 {
                0.0
            }
            fn component_gradient_into(&self, i: usize, _x: &Vector, out: &mut Vector) {
                out[0] = if i == 1 { f64::NAN } else { 0.0 };
            }
            fn smoothness(&self) -> f64 {
                1.0
            }
        }
        let oracle = Oracle::new(&Bad);
        let err = oracle.full_gradient(&Vector::zeros(1)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteGradient { component: 1 }));
    }

    #[test]
    fn concurrent_component_calls_tally_exactly() {
        let p = ScalarQuadratic { coeffs: vec![1.0, 2.0, 3.0, 4.0] };
        let oracle = Oracle::new(&p);
        let x = Vector::from_vec(vec![1.0]);
        std::thread::scope(|scope| {
            for _ in 0..4 {
                scope.spawn(|| {
                    for i in 0..200 {
                        oracle.component_gradient(i % 4, &x).unwrap();
                    }
                });
            }
        });
        assert_eq!(oracle.ifo_count(), 800);
    }

    #[test]
    fn central_difference_is_exact_on_quadratics() {
        let p = ScalarQuadratic { coeffs: vec![1.0] };
        let g = finite_difference_gradient(&p, &Vector::from_vec(vec![3.0]), 1e-6).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn finite_difference_rejects_nonpositive_step() {
        let p = ScalarQuadratic { coeffs: vec![1.0] };
        assert!(finite_difference_gradient(&p, &Vector::zeros(1), 0.0).is_err());
        assert!(finite_difference_gradient(&p, &Vector::zeros(1), -1e-6).is_err());
    }

    #[test]
    fn finite_difference_leaves_ledger_untouched() {
        let p = ScalarQuadratic { coeffs: vec![1.0, 2.0] };
        let oracle = Oracle::new(&p);
        finite_difference_gradient(oracle.problem(), &Vector::from_vec(vec![1.0]), 1e-6).unwrap();
        assert_eq!(oracle.ifo_count(), 0);
    }
}
