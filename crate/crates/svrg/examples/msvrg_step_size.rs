//! MSVRG's step-size rule: the run takes the larger of the horizon-dependent
//! `c / sqrt(T)` step and the fixed SVRG step, switching branches at the
//! crossover horizon.
//!
//! ```sh
//! cargo run --release --example msvrg_step_size
//! ```

use svrg::certificates::UniversalConstants;
use svrg::optimizers::{msvrg_crossover_t, run_msvrg, MsvrgBranch, RunOptions};
use svrg::problems::NonconvexLogisticProblem;
use svrg::{Oracle, Problem, Vector};

fn main() {
    let n = 200;
    let d = 8;
    let problem = NonconvexLogisticProblem::synthetic(n, d, 0.1, 5.0, 17).expect("instance");
    let sigma = problem.sigma_bound().expect("logistic is sigma-bounded");
    let x0 = Vector::zeros(d);
    let f_gap = problem.value(&x0); // loss is bounded below by zero
    let l = problem.smoothness();
    let consts = UniversalConstants::default();

    let c = (f_gap / (2.0 * l * sigma * sigma)).sqrt();
    let crossover = msvrg_crossover_t(c, l, n, consts.mu1);
    println!("crossover horizon T* = {crossover:.1}");

    for t in [
        ((0.2 * crossover) as usize).max(1),
        (5.0 * crossover) as usize,
    ] {
        let oracle = Oracle::new(&problem);
        let rec = run_msvrg(&oracle, &x0, t, sigma, f_gap, &consts, 3, &RunOptions::default())
            .expect("run");
        let sel = rec.msvrg.clone().expect("selection recorded");
        let branch = match sel.branch {
            MsvrgBranch::SgdLike => "c/sqrt(T)",
            MsvrgBranch::SvrgConstant => "fixed svrg step",
        };
        println!(
            "T = {t:>8}: branch = {branch:<15} eta = {:.4e} (candidates {:.4e} / {:.4e}), \
             final gns = {:.4e}",
            sel.eta,
            sel.eta_sgd,
            sel.eta_svrg,
            rec.final_grad_norm_sq().unwrap()
        );
    }
}
