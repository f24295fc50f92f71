//! Certify theoretical SVRG schedules across problem sizes and exponents.
//!
//! ```sh
//! cargo run --release --example certify_schedule
//! ```

use svrg::certificates::{theoretical_svrg_params, RateCertificate};

fn main() {
    println!("{}", RateCertificate::csv_header());
    for &n in &[10usize, 100, 1_000, 10_000] {
        for &alpha in &[1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0] {
            let params = theoretical_svrg_params(n, 1.0, alpha, 0.25).expect("valid inputs");
            let cert = params.certify(1.0).expect("certificate");
            println!("{}", cert.csv_row());
            assert!(cert.valid, "theoretical schedules must certify");
        }
    }

    println!();
    let params = theoretical_svrg_params(1000, 1.0, 2.0 / 3.0, 0.25).unwrap();
    let cert = params.certify(1.0).unwrap();
    print!("{}", cert.to_text());
}
