//! SVRG with snapshot epochs, in single-sample and mini-batch form.
//!
//! Each epoch computes the full gradient `g` at the snapshot point, then runs
//! `m` inner updates along the variance-reduced direction
//!
//! `v_t = (1/b) * sum_{i in I_t} (grad f_i(x_t) - grad f_i(snapshot)) + g`,
//!
//! with the mini-batch `I_t` drawn uniformly with replacement. The next
//! snapshot is the `p`-weighted combination of the epoch's iterates,
//! maintained as a running average so no trajectory is stored. The output
//! iterate `x_a` is sampled uniformly over all inner iterates by drawing a
//! single (epoch, step) pair up front and capturing that iterate in flight.
//!
//! Draw order from the seeded stream: 1 draw for the output pick, then
//! `batch_size` index draws per inner step in update order. This is the
//! replay contract the tests simulate against.
//!
//! IFO accounting: `n` units per epoch for the snapshot gradient plus `2b`
//! per inner update (the batch is evaluated at both the current iterate and
//! the snapshot), so a run of `S` epochs charges exactly `S * (n + 2bm)`.

use crate::error::{Error, Result};
use crate::oracle::{Oracle, RngStream, Vector};

use super::record::{iterate_ok, measure, RunOptions, RunRecord, RunStatus};
use super::schedule::SvrgSchedule;

/// Single-sample SVRG (`batch_size = 1`).
///
/// With `m = 1` every inner direction collapses to the full gradient at the
/// snapshot and the run reproduces plain gradient descent step for step.
/// A budget `T < m` still runs one full epoch.
pub fn run_svrg(
    oracle: &Oracle<'_>,
    x0: &Vector,
    schedule: &SvrgSchedule,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    if schedule.batch_size != 1 {
        return Err(Error::contract(
            "run_svrg requires batch_size = 1; use run_minibatch_svrg for b > 1",
        ));
    }
    svrg_loop(oracle, x0, schedule, seed, opts)
}

/// Mini-batch SVRG. With `batch_size = 1` this reproduces [`run_svrg`] bit
/// for bit under the same seed, because the index draw order is identical.
pub fn run_minibatch_svrg(
    oracle: &Oracle<'_>,
    x0: &Vector,
    schedule: &SvrgSchedule,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    svrg_loop(oracle, x0, schedule, seed, opts)
}

pub(crate) fn svrg_loop(
    oracle: &Oracle<'_>,
    x0: &Vector,
    schedule: &SvrgSchedule,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    schedule.validate()?;
    if x0.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            actual: x0.dim(),
        });
    }

    let problem = oracle.problem();
    let n = oracle.num_components();
    let m = schedule.epoch_len;
    let b = schedule.batch_size;
    let epochs = schedule.epochs();
    let total_inner = epochs * m;

    let mut rng = RngStream::new(seed);
    let pick = rng.next_index(total_inner);
    let (pick_epoch, pick_step) = (pick / m, pick % m);

    let algorithm = if b == 1 { "svrg" } else { "minibatch-svrg" };
    let mut record = RunRecord::new(algorithm, seed, schedule.echo(), x0);
    let mut trajectory = opts.capture_trajectory.then(|| vec![x0.clone()]);

    let mut x = x0.clone();
    let mut snapshot = x0.clone();
    let mut x_output: Option<Vector> = None;
    record.checkpoints.push(measure(problem, oracle, &x));

    let dim = x.dim();
    let mut g = Vector::zeros(dim);
    let mut dir = Vector::zeros(dim);
    let mut buf = Vector::zeros(dim);
    let mut weighted = Vector::zeros(dim);

    'epochs: for s in 0..epochs {
        oracle.full_gradient_into(&snapshot, &mut g)?;

        weighted.fill(0.0);
        let p = &schedule.snapshot_dist;
        if p[0] != 0.0 {
            weighted.axpy(p[0], &x);
        }
        for t in 0..m {
            if s == pick_epoch && t == pick_step {
                x_output = Some(x.clone());
            }
            // Accumulate the batch correction first and add g last, so the
            // component terms cancel exactly when x equals the snapshot.
            dir.fill(0.0);
            let inv_b = 1.0 / b as f64;
            for _ in 0..b {
                let i = rng.next_index(n);
                oracle.component_gradient_into(i, &x, &mut buf)?;
                dir.axpy(inv_b, &buf);
                oracle.component_gradient_into(i, &snapshot, &mut buf)?;
                dir.axpy(-inv_b, &buf);
            }
            dir.axpy(1.0, &g);
            x.axpy(-schedule.eta[t], &dir);
            if let Some(tr) = trajectory.as_mut() {
                tr.push(x.clone());
            }
            if !iterate_ok(&x) {
                record.status = RunStatus::Diverged {
                    step: (s * m + t) as u64,
                };
                break 'epochs;
            }
            if p[t + 1] != 0.0 {
                weighted.axpy(p[t + 1], &x);
            }
        }
        snapshot.copy_from(&weighted);
        record.checkpoints.push(measure(problem, oracle, &snapshot));
    }

    record.x_output = x_output.unwrap_or_else(|| x.clone());
    record.x_final = if record.status.is_diverged() { x } else { snapshot };
    record.ifo_total = oracle.ifo_count();
    record.trajectory = trajectory;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::run_gd;
    use crate::oracle::{Oracle, Problem};
    use crate::problems::{make_quadratic, NonconvexLogisticProblem, QuadraticProblem};

    fn scalar_quadratic(coeffs: Vec<f64>) -> QuadraticProblem {
        let diags: Vec<Vec<f64>> = coeffs.iter().map(|&a| vec![a]).collect();
        let linear = vec![vec![0.0]; coeffs.len()];
        QuadraticProblem::from_parts(vec![1.0], diags, linear).unwrap()
    }

    #[test]
    fn epoch_ifo_accounting_is_exact() {
        let p = make_quadratic(11, 3, 0.2, 1).unwrap();
        let x0 = Vector::from_vec(vec![1.0, 0.5, -0.2]);
        for b in [1usize, 2, 4] {
            let schedule = SvrgSchedule::nonconvex(0.01, 5, 15).with_batch_size(b);
            let oracle = Oracle::new(&p);
            let rec = run_minibatch_svrg(&oracle, &x0, &schedule, 3, &RunOptions::default())
                .unwrap();
            let epochs = 3u64;
            assert_eq!(rec.ifo_total, epochs * (11 + 5 * 2 * b as u64));
        }
    }

    #[test]
    fn budget_below_epoch_length_still_runs_one_full_epoch() {
        let p = make_quadratic(5, 2, 0.3, 2).unwrap();
        let schedule = SvrgSchedule::nonconvex(0.01, 10, 3);
        let oracle = Oracle::new(&p);
        let rec = run_svrg(
            &oracle,
            &Vector::from_vec(vec![1.0, 1.0]),
            &schedule,
            5,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(rec.ifo_total, 5 + 2 * 10);
        assert_eq!(rec.checkpoints.len(), 2);
    }

    #[test]
    fn m_equal_one_reduces_to_gradient_descent() {
        let p = make_quadratic(9, 4, 0.2, 7).unwrap();
        let x0 = Vector::from_vec(vec![2.0, -1.0, 0.5, 0.1]);
        let eta = 0.4 / p.smoothness();
        let steps = 50;

        let o1 = Oracle::new(&p);
        let gd = run_gd(&o1, &x0, steps, eta, &RunOptions::trajectory()).unwrap();
        let o2 = Oracle::new(&p);
        let schedule = SvrgSchedule::nonconvex(eta, 1, steps);
        let vr = run_svrg(&o2, &x0, &schedule, 99, &RunOptions::trajectory()).unwrap();

        let gd_tr = gd.trajectory.unwrap();
        let vr_tr = vr.trajectory.unwrap();
        assert_eq!(gd_tr.len(), vr_tr.len());
        for (a, b) in gd_tr.iter().zip(&vr_tr) {
            assert!(a.dist_sq(b).sqrt() <= 1e-12);
        }
    }

    #[test]
    fn replay_against_hand_simulation() {
        // n = 3 scalar quadratic, m = 2, one epoch: the run must equal an
        // independent simulation that replays the documented draw order.
        let coeffs = vec![0.5, 1.0, 2.0];
        let p = scalar_quadratic(coeffs.clone());
        let seed = 77;
        let eta = 0.1;
        let schedule = SvrgSchedule::nonconvex(eta, 2, 2);
        let oracle = Oracle::new(&p);
        let rec = run_svrg(
            &oracle,
            &Vector::from_vec(vec![1.0]),
            &schedule,
            seed,
            &RunOptions::trajectory(),
        )
        .unwrap();

        let mut rng = crate::oracle::RngStream::new(seed);
        let _pick = rng.next_index(2); // output draw comes first
        let mean: f64 = coeffs.iter().sum::<f64>() / 3.0;
        let snap = 1.0f64;
        let g = mean * snap;
        let mut x = snap;
        let mut expected = vec![x];
        for _ in 0..2 {
            let i = rng.next_index(3);
            let v = coeffs[i] * x - coeffs[i] * snap + g;
            x -= eta * v;
            expected.push(x);
        }
        let traj = rec.trajectory.unwrap();
        assert_eq!(traj.len(), expected.len());
        for (got, want) in traj.iter().zip(&expected) {
            assert!((got[0] - want).abs() < 1e-15, "{} vs {want}", got[0]);
        }
    }

    #[test]
    fn batch_one_minibatch_is_bit_identical_to_svrg() {
        let p = NonconvexLogisticProblem::synthetic(20, 4, 0.1, 5.0, 3).unwrap();
        let x0 = Vector::from_vec(vec![0.2, -0.4, 0.1, 0.6]);
        let schedule = SvrgSchedule::nonconvex(0.05, 6, 18);
        let o1 = Oracle::new(&p);
        let a = run_svrg(&o1, &x0, &schedule, 11, &RunOptions::default()).unwrap();
        let o2 = Oracle::new(&p);
        let mut b = run_minibatch_svrg(&o2, &x0, &schedule, 11, &RunOptions::default()).unwrap();
        b.algorithm = a.algorithm.clone();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_seeds_identical_records() {
        let p = NonconvexLogisticProblem::synthetic(15, 3, 0.2, 5.0, 8).unwrap();
        let x0 = Vector::zeros(3);
        let schedule = SvrgSchedule::nonconvex(0.1, 4, 12).with_batch_size(2);
        let o1 = Oracle::new(&p);
        let o2 = Oracle::new(&p);
        let a = run_minibatch_svrg(&o1, &x0, &schedule, 42, &RunOptions::default()).unwrap();
        let b = run_minibatch_svrg(&o2, &x0, &schedule, 42, &RunOptions::default()).unwrap();
        assert_eq!(a, b);
        let o3 = Oracle::new(&p);
        let c = run_minibatch_svrg(&o3, &x0, &schedule, 43, &RunOptions::default()).unwrap();
        assert_ne!(a.x_output, c.x_output);
    }

    #[test]
    fn convex_mode_snapshot_is_epoch_average() {
        let p = scalar_quadratic(vec![1.0, 2.0]);
        let schedule = SvrgSchedule::convex(0.05, 3, 3);
        let oracle = Oracle::new(&p);
        let rec = run_svrg(
            &oracle,
            &Vector::from_vec(vec![1.0]),
            &schedule,
            21,
            &RunOptions::trajectory(),
        )
        .unwrap();
        let traj = rec.trajectory.unwrap();
        // snapshot = mean of x_0, x_1, x_2 (trajectory indices 0..=2)
        let want = (traj[0][0] + traj[1][0] + traj[2][0]) / 3.0;
        assert!((rec.x_final[0] - want).abs() < 1e-15);
    }

    #[test]
    fn checkpoints_never_touch_the_ledger() {
        let p = make_quadratic(7, 2, 0.5, 3).unwrap();
        let x0 = Vector::from_vec(vec![1.0, -1.0]);
        let schedule = SvrgSchedule::nonconvex(0.05, 4, 8);
        let o1 = Oracle::new(&p);
        let with = run_svrg(&o1, &x0, &schedule, 5, &RunOptions::default()).unwrap();
        let o2 = Oracle::new(&p);
        let without = run_svrg(&o2, &x0, &schedule, 5, &RunOptions::trajectory()).unwrap();
        // instrumentation choices do not change cost or iterates
        assert_eq!(with.ifo_total, without.ifo_total);
        assert_eq!(with.x_final, without.x_final);
        assert_eq!(with.x_output, without.x_output);
    }
}
