//! SVRG against SGD on a nonconvex logistic instance: same IFO budget, same
//! seeds, one table.
//!
//! ```sh
//! cargo run --release --example svrg_vs_sgd
//! ```

use svrg::bench::{compare_runs, fit_rate, TaggedRun};
use svrg::certificates::theoretical_svrg_params;
use svrg::optimizers::{run_sgd, run_svrg, RunOptions, StepSizes, SvrgSchedule};
use svrg::problems::NonconvexLogisticProblem;
use svrg::{Oracle, Problem, Vector};

fn main() {
    let n = 800;
    let d = 12;
    let problem = NonconvexLogisticProblem::synthetic(n, d, 0.05, 5.0, 7).expect("instance");
    let l = problem.smoothness();
    let x0 = Vector::from_vec(vec![0.5; d]);
    let budget_passes = 25.0;
    let seeds: Vec<u64> = (1..=5).collect();

    let params = theoretical_svrg_params(n, l, 2.0 / 3.0, 0.25).expect("schedule");
    let epoch_cost = n + 2 * params.epoch_len;
    let epochs = (budget_passes * n as f64 / epoch_cost as f64).floor() as usize;
    let schedule = SvrgSchedule::nonconvex(params.eta, params.epoch_len, epochs * params.epoch_len);

    let mut runs = Vec::new();
    for &seed in &seeds {
        let oracle = Oracle::new(&problem);
        let rec = run_svrg(&oracle, &x0, &schedule, seed, &RunOptions::default()).unwrap();
        runs.push(tag("svrg", seed, rec.checkpoints.clone()));

        let oracle = Oracle::new(&problem);
        let steps = (budget_passes * n as f64) as usize;
        let sizes = StepSizes::TInverse { eta0: 0.5 / l, decay: 1.0, pass_len: n };
        let rec = run_sgd(&oracle, &x0, steps, &sizes, 1, seed, &RunOptions::default()).unwrap();
        runs.push(tag("sgd-tinv", seed, rec.checkpoints.clone()));
    }

    let table = compare_runs(&runs).unwrap();
    print!("{}", table.to_text());

    for alg in ["svrg", "sgd-tinv"] {
        let series: Vec<(f64, f64)> = runs
            .iter()
            .find(|r| r.algorithm == alg && r.seed == 1)
            .unwrap()
            .checkpoints
            .iter()
            .map(|c| (c.passes, c.grad_norm_sq))
            .collect();
        match fit_rate(&series, (1.0, budget_passes + 1.0)) {
            Ok(slope) => println!("{alg}: fitted rate exponent {slope:.3} (seed 1)"),
            Err(err) => println!("{alg}: {err}"),
        }
    }
}

fn tag(alg: &str, seed: u64, checkpoints: Vec<svrg::optimizers::Checkpoint>) -> TaggedRun {
    TaggedRun {
        problem: "logistic demo".into(),
        algorithm: alg.into(),
        seed,
        checkpoints,
        f_star: None,
    }
}
