//! Command-line harness over the library: run experiments, certify
//! schedules, compare results, check variance bounds, and fit rates.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use svrg::bench::{
    compare_dir, fit_rate, parse_experiment_spec, parse_run_csv, run_experiment,
};
use svrg::certificates::{theoretical_minibatch_params, theoretical_svrg_params, RateCertificate};
use svrg::{RngStream, Vector};

#[derive(Parser)]
#[command(
    name = "svrg-bench",
    about = "Benchmark harness for variance-reduced finite-sum optimizers",
    after_help = "Default output directory comes from the spec file, --out, or $SVRG_BENCH_OUT."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, seed) pair of an experiment spec and write CSVs
    /// plus a manifest.
    Run {
        /// Experiment spec file (flat key = value sections).
        spec: PathBuf,
        /// Output directory (overrides the spec and $SVRG_BENCH_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a theoretical schedule: print the step sizes, epoch length,
    /// and margin for a problem of size n with smoothness L.
    Certify {
        n: usize,
        l: f64,
        alpha: f64,
        b: usize,
        mu: f64,
        /// Emit a machine-readable CSV row instead of the text block.
        #[arg(long)]
        csv: bool,
    },
    /// Summarize an experiment directory into a per-problem comparison
    /// table, printed as aligned text and written as comparison.csv.
    Compare { dir: PathBuf },
    /// Sample (x, snapshot) pairs for the spec's problem and check the
    /// variance-reduction bound by exact enumeration.
    VarianceCheck {
        /// Experiment spec file (only its [experiment] and [problem]
        /// sections are used).
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit the log-log convergence slope of one run CSV.
    FitRate {
        csv: PathBuf,
        /// Pass window as lo:hi (default: everything after the first pass).
        #[arg(long)]
        window: Option<String>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("svrg-bench: error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run { spec, out } => {
            let text = std::fs::read_to_string(&spec)?;
            let spec = parse_experiment_spec(&text)?;
            let output = run_experiment(&spec, out.as_deref())?;
            println!("problem: {}", output.problem_label);
            for run in &output.runs {
                println!(
                    "  {} seed {} -> {} ({})",
                    run.algorithm,
                    run.seed,
                    run.csv_path.display(),
                    run.record.status.label()
                );
            }
            println!("manifest: {}", output.manifest_path.display());
            Ok(())
        }
        Command::Certify { n, l, alpha, b, mu, csv } => {
            let params = if b == 1 {
                theoretical_svrg_params(n, l, alpha, mu)?
            } else {
                if (alpha - 2.0 / 3.0).abs() > 1e-12 {
                    return Err(format!(
                        "mini-batch schedules are certified at alpha = 2/3 only (got {alpha})"
                    )
                    .into());
                }
                theoretical_minibatch_params(n, l, b, mu)?
            };
            let cert = params.certify(l)?;
            if csv {
                println!("{}", RateCertificate::csv_header());
                println!("{}", cert.csv_row());
            } else {
                print!("{}", cert.to_text());
            }
            if !cert.valid {
                return Err("certificate is invalid (some margin is nonpositive)".into());
            }
            Ok(())
        }
        Command::Compare { dir } => {
            let table = compare_dir(&dir)?;
            print!("{}", table.to_text());
            let path = dir.join("comparison.csv");
            std::fs::write(&path, table.to_csv())?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::VarianceCheck { spec, pairs, batch, seed } => {
            let text = std::fs::read_to_string(&spec)?;
            let spec = parse_experiment_spec(&text)?;
            let built = svrg::bench::build_problem(&spec.problem, spec.problem_seed)?;
            let problem = built.problem.as_ref();
            let dim = problem.dim();
            let mut rng = RngStream::new(seed);
            let mut worst_margin = f64::INFINITY;
            let mut violations = 0usize;
            for _ in 0..pairs {
                let x = Vector::from_vec((0..dim).map(|_| rng.next_gaussian()).collect());
                let s = Vector::from_vec((0..dim).map(|_| rng.next_gaussian()).collect());
                let diag = svrg::certificates::variance_diagnostic(problem, &x, &s, batch)?;
                let margin = diag.bound - diag.mean_sq;
                worst_margin = worst_margin.min(margin);
                if diag.mean_sq > diag.bound + 1e-9 {
                    violations += 1;
                }
            }
            println!(
                "checked {pairs} pairs at batch {batch}: worst margin {worst_margin:.6e}, \
                 violations {violations}"
            );
            if violations > 0 {
                return Err(format!("{violations} pairs violated the variance bound").into());
            }
            Ok(())
        }
        Command::FitRate { csv, window } => {
            let checkpoints = parse_run_csv(&csv)?;
            let series: Vec<(f64, f64)> =
                checkpoints.iter().map(|c| (c.passes, c.grad_norm_sq)).collect();
            let window = match window {
                Some(text) => {
                    let (lo, hi) = text.split_once(':').ok_or("window must be lo:hi")?;
                    (lo.parse::<f64>()?, hi.parse::<f64>()?)
                }
                None => {
                    let hi = series.iter().map(|p| p.0).fold(0.0, f64::max);
                    (0.0, hi + 1.0)
                }
            };
            let slope = fit_rate(&series, window)?;
            println!("rate exponent: {slope:.4}");
            Ok(())
        }
    }
}
