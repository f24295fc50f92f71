//! Mini-batch SVRG at equal IFO budget: larger batches take proportionally
//! fewer inner updates to reach the same stationarity, because the
//! theoretical schedule scales the step size up with the batch.
//!
//! ```sh
//! cargo run --release --example minibatch_scaling
//! ```

use svrg::certificates::theoretical_minibatch_params;
use svrg::optimizers::{run_minibatch_svrg, RunOptions, SvrgSchedule};
use svrg::problems::NonconvexLogisticProblem;
use svrg::{Oracle, Vector};

fn main() {
    let n = 1000;
    let d = 15;
    let problem = NonconvexLogisticProblem::synthetic(n, d, 0.05, 5.0, 11).expect("instance");
    let l = svrg::Problem::smoothness(&problem);
    let x0 = Vector::from_vec(vec![0.4; d]);
    let budget_passes = 20.0;

    println!("{:>4} {:>10} {:>8} {:>8} {:>14} {:>14}", "b", "eta", "m", "updates", "final gns", "ifo");
    for b in [1usize, 4, 16] {
        let params = theoretical_minibatch_params(n, l, b, 0.25).expect("schedule");
        let cert = params.certify(l).expect("certificate");
        assert!(cert.valid);
        let epoch_cost = n + 2 * b * params.epoch_len;
        let epochs = (budget_passes * n as f64 / epoch_cost as f64).floor() as usize;
        let schedule = SvrgSchedule::nonconvex(
            params.eta,
            params.epoch_len,
            epochs * params.epoch_len,
        )
        .with_batch_size(b);

        let oracle = Oracle::new(&problem);
        let rec =
            run_minibatch_svrg(&oracle, &x0, &schedule, 42, &RunOptions::default()).unwrap();
        println!(
            "{:>4} {:>10.2e} {:>8} {:>8} {:>14.6e} {:>14}",
            b,
            params.eta,
            params.epoch_len,
            schedule.total_inner,
            rec.final_grad_norm_sq().unwrap(),
            rec.ifo_total,
        );
    }
}
