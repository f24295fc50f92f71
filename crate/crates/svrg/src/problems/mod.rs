//! Concrete finite-sum instances with known analytic properties, plus data
//! ingestion and smoothness estimation.

mod data;
mod logistic;
mod mlp;
mod quadratic;

pub use data::{
    dump_csv, load_libsvm, make_synthetic_classification,
    make_synthetic_classification_with_separation, write_libsvm,
};
pub use logistic::NonconvexLogisticProblem;
pub use mlp::MlpProblem;
pub use quadratic::{make_quadratic, QuadraticProblem};

use crate::error::{Error, Result};
use crate::oracle::{Problem, RngStream, Vector};

/// Empirical estimate of the per-component gradient Lipschitz constant:
/// the max of `||grad f_i(x) - grad f_i(y)|| / ||x - y||` over sampled
/// `(i, x, y)` triples at mixed length scales. A lower bound on the true
/// constant; for instances with exact constants it approaches them from
/// below, and for models without closed-form constants it is the heuristic
/// step-size scale.
pub fn estimate_smoothness(problem: &dyn Problem, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::contract("need at least one trial"));
    }
    let n = problem.num_components();
    let d = problem.dim();
    let mut rng = RngStream::new(seed);
    let mut best = 0.0f64;
    let mut gx = Vector::zeros(d);
    let mut gy = Vector::zeros(d);
    for _ in 0..trials {
        let i = rng.next_index(n);
        let x = Vector::from_vec((0..d).map(|_| rng.next_gaussian()).collect());
        let scale = 10f64.powf(rng.next_range(-3.0, 0.0));
        let mut y = x.clone();
        for j in 0..d {
            y[j] += scale * rng.next_gaussian();
        }
        let dist = x.dist_sq(&y).sqrt();
        if dist == 0.0 {
            continue; // degenerate sample, never divide by zero
        }
        problem.component_gradient_into(i, &x, &mut gx);
        problem.component_gradient_into(i, &y, &mut gy);
        let ratio = gx.dist_sq(&gy).sqrt() / dist;
        best = best.max(ratio);
    }
    Ok(best)
}
