//! Restarted SVRG for gradient-dominated objectives.
//!
//! Runs SVRG `K` times, each restart starting from the previous run's sampled
//! output iterate. On a tau-gradient-dominated objective with the theoretical
//! inner schedule, each restart halves the expected squared gradient norm (and
//! the optimality gap), so the whole procedure converges linearly to a global
//! optimum without any convexity assumption.

use crate::certificates::UniversalConstants;
use crate::error::{Error, Result};
use crate::oracle::{Oracle, RngStream, Vector};

use super::record::{measure, RunOptions, RunRecord};
use super::schedule::SvrgSchedule;
use super::svrg::svrg_loop;

/// The theoretical inner schedule for a tau-gradient-dominated objective:
/// `T = ceil(2 L tau n^{2/3} / nu1)`, `m = floor(n / (3 mu1))`,
/// `eta = mu1 / (L n^{2/3})` with the last-iterate snapshot.
///
/// Returns the schedule plus an advisory warning when `tau <= n^{1/3}`, where
/// the halving guarantee has no certificate (runs still proceed).
pub fn gd_svrg_theoretical_schedule(
    n: usize,
    smoothness: f64,
    tau: f64,
    constants: &UniversalConstants,
) -> Result<(SvrgSchedule, Option<String>)> {
    constants.validate()?;
    if n == 0 || !(smoothness > 0.0) || !(tau > 0.0) {
        return Err(Error::contract("need n >= 1, L > 0, and tau > 0"));
    }
    let nf = n as f64;
    let n_two_thirds = nf.powf(2.0 / 3.0);
    let eta = constants.mu1 / (smoothness * n_two_thirds);
    let epoch_len = (nf / (3.0 * constants.mu1)).floor() as usize;
    if epoch_len == 0 {
        return Err(Error::contract("epoch length floored to zero; decrease mu1"));
    }
    let total_inner = (2.0 * smoothness * tau * n_two_thirds / constants.nu1).ceil() as usize;
    let warning = (tau <= nf.powf(1.0 / 3.0)).then(|| {
        format!(
            "tau = {tau} does not exceed n^(1/3) = {:.3}; the per-restart halving \
             guarantee does not apply",
            nf.powf(1.0 / 3.0)
        )
    });
    Ok((SvrgSchedule::nonconvex(eta, epoch_len, total_inner), warning))
}

/// Restart SVRG `outer_iters` times. Restart `k` is seeded with the `k`-th
/// `u64` drawn from a stream seeded by `seed`, so `outer_iters = 1` equals a
/// single [`run_svrg`](super::run_svrg) call under that derived seed.
///
/// The returned record keeps one checkpoint per restart boundary (measured at
/// the restart's sampled output) on top of the initial one; the IFO ledger
/// runs continuously across restarts.
pub fn run_gd_svrg(
    oracle: &Oracle<'_>,
    x0: &Vector,
    outer_iters: usize,
    schedule: &SvrgSchedule,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    if outer_iters == 0 {
        return Err(Error::contract("need at least one outer iteration"));
    }
    schedule.validate()?;

    let problem = oracle.problem();
    let mut record = RunRecord::new(
        "gd-svrg",
        seed,
        format!("outer={outer_iters} {}", schedule.echo()),
        x0,
    );
    record.checkpoints.push(measure(problem, oracle, x0));

    let mut seeder = RngStream::new(seed);
    let mut x = x0.clone();
    let mut trajectory = opts.capture_trajectory.then(|| vec![x0.clone()]);
    for _k in 0..outer_iters {
        let restart_seed = seeder.next_u64();
        let inner = svrg_loop(oracle, &x, schedule, restart_seed, opts)?;
        x = inner.x_output.clone();
        if let (Some(tr), Some(inner_tr)) = (trajectory.as_mut(), inner.trajectory.as_ref()) {
            tr.extend(inner_tr.iter().skip(1).cloned());
        }
        record.checkpoints.push(measure(problem, oracle, &x));
        if inner.status.is_diverged() {
            record.status = inner.status;
            break;
        }
    }

    record.x_output = x.clone();
    record.x_final = x;
    record.ifo_total = oracle.ifo_count();
    record.trajectory = trajectory;
    Ok(record)
}
