//! Plain stochastic gradient descent and full gradient descent.

use crate::error::{Error, Result};
use crate::oracle::{Oracle, RngStream, Vector};

use super::record::{iterate_ok, measure, RunOptions, RunRecord, RunStatus};
use super::schedule::StepSizes;

/// Stochastic gradient descent: `x <- x - eta_t * g_t` where `g_t` averages
/// the gradients of `batch_size` components drawn uniformly with replacement.
///
/// Draw order: each step consumes exactly `batch_size` index draws from the
/// seeded stream, in update order. A run of `steps` iterations charges
/// exactly `steps * batch_size` IFO units; checkpoints are recorded once per
/// pass (every `ceil(n / batch_size)` steps) with uncounted instrumentation.
pub fn run_sgd(
    oracle: &Oracle<'_>,
    x0: &Vector,
    steps: usize,
    step_sizes: &StepSizes,
    batch_size: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    step_sizes.validate()?;
    if steps == 0 {
        return Err(Error::contract("need at least one step"));
    }
    if batch_size == 0 {
        return Err(Error::contract("batch size must be at least 1"));
    }
    if x0.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            actual: x0.dim(),
        });
    }

    let problem = oracle.problem();
    let n = oracle.num_components();
    let checkpoint_stride = n.div_ceil(batch_size);
    let mut rng = RngStream::new(seed);

    let mut record = RunRecord::new(
        "sgd",
        seed,
        format!("steps={} b={batch_size} T={steps}", step_sizes.echo()),
        x0,
    );
    let mut x = x0.clone();
    let mut trajectory = opts.capture_trajectory.then(|| vec![x.clone()]);
    record.checkpoints.push(measure(problem, oracle, &x));

    let mut grad = Vector::zeros(x.dim());
    let mut buf = Vector::zeros(x.dim());
    for t in 0..steps {
        if batch_size == 1 {
            let i = rng.next_index(n);
            oracle.component_gradient_into(i, &x, &mut grad)?;
        } else {
            grad.fill(0.0);
            for _ in 0..batch_size {
                let i = rng.next_index(n);
                oracle.component_gradient_into(i, &x, &mut buf)?;
                grad.axpy(1.0, &buf);
            }
            grad.scale(1.0 / batch_size as f64);
        }
        x.axpy(-step_sizes.at(t), &grad);
        if let Some(tr) = trajectory.as_mut() {
            tr.push(x.clone());
        }
        if !iterate_ok(&x) {
            record.status = RunStatus::Diverged { step: t as u64 };
            break;
        }
        if (t + 1) % checkpoint_stride == 0 && t + 1 < steps {
            record.checkpoints.push(measure(problem, oracle, &x));
        }
    }

    if !record.status.is_diverged() {
        record.checkpoints.push(measure(problem, oracle, &x));
    }
    record.x_output = x.clone();
    record.x_final = x;
    record.ifo_total = oracle.ifo_count();
    record.trajectory = trajectory;
    Ok(record)
}

/// Full gradient descent: `x <- x - eta * grad f(x)`; each step charges `n`
/// IFO units and records a checkpoint.
pub fn run_gd(
    oracle: &Oracle<'_>,
    x0: &Vector,
    steps: usize,
    eta: f64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::contract(format!("step size must be positive, got {eta}")));
    }
    if steps == 0 {
        return Err(Error::contract("need at least one step"));
    }
    let problem = oracle.problem();
    let mut record = RunRecord::new("gd", 0, format!("eta={eta} steps={steps}"), x0);
    let mut x = x0.clone();
    let mut trajectory = opts.capture_trajectory.then(|| vec![x.clone()]);
    record.checkpoints.push(measure(problem, oracle, &x));

    let mut grad = Vector::zeros(x.dim());
    for k in 0..steps {
        oracle.full_gradient_into(&x, &mut grad)?;
        x.axpy(-eta, &grad);
        if let Some(tr) = trajectory.as_mut() {
            tr.push(x.clone());
        }
        if !iterate_ok(&x) {
            record.status = RunStatus::Diverged { step: k as u64 };
            break;
        }
        record.checkpoints.push(measure(problem, oracle, &x));
    }

    record.x_output = x.clone();
    record.x_final = x;
    record.ifo_total = oracle.ifo_count();
    record.trajectory = trajectory;
    Ok(record)
}
