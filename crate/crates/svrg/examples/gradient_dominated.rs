//! Linear convergence of restarted SVRG on a gradient-dominated quadratic:
//! each outer restart at least halves the expected squared gradient norm.
//!
//! ```sh
//! cargo run --release --example gradient_dominated
//! ```

use svrg::certificates::UniversalConstants;
use svrg::optimizers::{gd_svrg_theoretical_schedule, run_gd_svrg, RunOptions};
use svrg::problems::make_quadratic;
use svrg::{Oracle, Problem, Vector};

fn main() {
    let n = 100;
    let d = 10;
    let problem = make_quadratic(n, d, 0.05, 3).expect("instance");
    println!(
        "quadratic: n = {n}, d = {d}, L = {}, tau = {} (> n^(1/3) = {:.3})",
        problem.smoothness(),
        problem.tau(),
        (n as f64).powf(1.0 / 3.0)
    );

    let consts = UniversalConstants::default();
    let (schedule, warning) =
        gd_svrg_theoretical_schedule(n, problem.smoothness(), problem.tau(), &consts).unwrap();
    if let Some(w) = warning {
        println!("warning: {w}");
    }
    println!("inner schedule: {}", schedule.echo());

    let outer = 5;
    let seeds = 20;
    let x0 = Vector::from_vec(vec![2.0; d]);
    let gns0 = problem.grad_norm_sq(&x0);

    let mut means = vec![0.0f64; outer + 1];
    for seed in 0..seeds {
        let oracle = Oracle::new(&problem);
        let rec = run_gd_svrg(&oracle, &x0, outer, &schedule, seed, &RunOptions::default())
            .expect("run");
        for (k, c) in rec.checkpoints.iter().enumerate() {
            means[k] += c.grad_norm_sq / seeds as f64;
        }
    }

    println!("\n k   mean ||grad f(x^k)||^2   halving target 2^-k * initial");
    for (k, mean) in means.iter().enumerate() {
        let target = gns0 / (1u64 << k) as f64;
        let marker = if *mean <= target { "ok" } else { "above" };
        println!("{k:>2}   {mean:>20.6e}   {target:>18.6e}  {marker}");
    }
}
