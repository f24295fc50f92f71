//! Dataset plumbing: synthetic blobs, libsvm round trips, CSV dumps, and the
//! smoothness estimator.
//!
//! ```sh
//! cargo run --release --example data_pipeline
//! ```

use svrg::problems::{
    dump_csv, estimate_smoothness, load_libsvm, make_synthetic_classification, write_libsvm,
    NonconvexLogisticProblem,
};

fn main() {
    let dir = std::env::temp_dir().join("svrg-data-pipeline");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let (rows, classes) = make_synthetic_classification(40, 6, 2, 9).expect("blobs");
    let labels: Vec<f64> = classes.iter().map(|&c| if c == 0 { -1.0 } else { 1.0 }).collect();
    println!(
        "generated {} rows in {} dims, class balance {}/{}",
        rows.len(),
        rows[0].dim(),
        classes.iter().filter(|&&c| c == 0).count(),
        classes.iter().filter(|&&c| c == 1).count()
    );

    let libsvm_path = dir.join("blobs.libsvm");
    write_libsvm(&libsvm_path, &rows, &labels).expect("write libsvm");
    let (loaded, loaded_labels) = load_libsvm(&libsvm_path).expect("load libsvm");
    println!(
        "libsvm round trip: {} rows loaded, features rescaled into [0, 1]",
        loaded.len()
    );
    let in_unit = loaded
        .iter()
        .flat_map(|r| r.iter())
        .all(|&v| (0.0..=1.0).contains(&v));
    assert!(in_unit, "every feature lies in [0, 1] after loading");

    let csv_path = dir.join("blobs.csv");
    dump_csv(&csv_path, &loaded, &loaded_labels).expect("dump csv");
    println!("wrote {}", csv_path.display());

    let problem = NonconvexLogisticProblem::new(loaded, loaded_labels, 0.1).expect("instance");
    let l_analytic = svrg::Problem::smoothness(&problem);
    let l_estimate = estimate_smoothness(&problem, 2000, 3).expect("estimate");
    println!(
        "smoothness: analytic bound {l_analytic:.4}, empirical estimate {l_estimate:.4} \
         (estimate never exceeds the bound)"
    );
    assert!(l_estimate <= l_analytic + 1e-9);
}
