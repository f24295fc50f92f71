//! End-to-end experiment from a spec file: write the spec, run it, read the
//! artifacts back, and print the comparison table: the same flow as
//! `svrg-bench run` followed by `svrg-bench compare`.
//!
//! ```sh
//! cargo run --release --example experiment_file
//! ```

use svrg::bench::{compare_dir, parse_experiment_spec, run_experiment};

fn main() {
    let dir = std::env::temp_dir().join("svrg-experiment-file");
    let spec_text = format!(
        "[experiment]\n\
         name = quadratic-shootout\n\
         seeds = 1,2,3,4,5\n\
         budget_passes = 60\n\
         problem_seed = 8\n\
         output_dir = {}\n\
         \n\
         [problem]\n\
         kind = quadratic\n\
         n = 500\n\
         d = 8\n\
         lambda = 0.05\n\
         \n\
         [algorithm.gd]\n\
         kind = gd\n\
         \n\
         [algorithm.svrg]\n\
         kind = svrg\n\
         schedule = explicit\n\
         eta = 0.1\n\
         m = 500\n\
         \n\
         [algorithm.sgd]\n\
         kind = sgd\n\
         steps = tinv:1.0,1.0\n",
        dir.display()
    );
    let spec_path = dir.join("experiment.spec");
    std::fs::create_dir_all(&dir).expect("output dir");
    std::fs::write(&spec_path, &spec_text).expect("write spec");

    let spec = parse_experiment_spec(&spec_text).expect("spec parses");
    let out = run_experiment(&spec, None).expect("experiment runs");
    println!(
        "ran {} (algorithm, seed) pairs; manifest at {}",
        out.runs.len(),
        out.manifest_path.display()
    );

    let table = compare_dir(&dir).expect("artifacts readable");
    print!("{}", table.to_text());
}
