//! End-to-end checks of the `svrg-bench` binary and its file contracts.

use std::path::Path;
use std::process::Command;

fn bench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_svrg-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path) -> std::path::PathBuf {
    let spec_path = dir.join("exp.spec");
    let text = format!(
        "[experiment]\n\
         name = cli-demo\n\
         seeds = 1,2\n\
         budget_passes = 10\n\
         problem_seed = 3\n\
         output_dir = {}\n\
         \n\
         [problem]\n\
         kind = quadratic\n\
         n = 80\n\
         d = 4\n\
         lambda = 0.1\n\
         \n\
         [algorithm.gd]\n\
         kind = gd\n\
         \n\
         [algorithm.svrg]\n\
         kind = svrg\n\
         schedule = theoretical\n",
        dir.join("out").display()
    );
    std::fs::write(&spec_path, text).unwrap();
    spec_path
}

#[test]
fn run_then_compare_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path());

    let out = bench(&["run", spec.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("manifest:"));

    let out_dir = dir.path().join("out");
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("rng = chacha8"));
    for name in ["gd-seed1.csv", "gd-seed2.csv", "svrg-seed1.csv", "svrg-seed2.csv"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
        let text = std::fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(
            text.starts_with("effective_passes,ifo_calls,f_value,grad_norm_sq"),
            "unexpected header in {name}"
        );
    }

    let out = bench(&["compare", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("problem: quadratic"));
    assert!(out_dir.join("comparison.csv").exists());

    let out = bench(&["fit-rate", out_dir.join("gd-seed1.csv").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("rate exponent:"));
}

#[test]
fn certify_prints_text_and_csv() {
    let out = bench(&["certify", "1000", "1.0", "0.6666666666666666", "1", "0.25"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("VALID"));
    assert!(stdout.contains("m           = 1333"));

    let out = bench(&["certify", "1000", "1.0", "0.6666666666666666", "4", "0.25", "--csv"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("n,alpha,b,eta,beta,m,gamma_n,bound,valid"));
    assert!(stdout.contains(",333,"));
}

#[test]
fn variance_check_passes_on_a_real_problem() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path());
    let out = bench(&[
        "variance-check",
        spec.to_str().unwrap(),
        "--pairs",
        "25",
        "--batch",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("violations 0"));
}

#[test]
fn failures_exit_nonzero_with_structured_messages() {
    // oversized mini-batch violates the schedule precondition
    let out = bench(&["certify", "1000", "1.0", "0.6666666666666666", "100", "0.25"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("b < n^(2/3)"));

    // missing spec file
    let out = bench(&["run", "/nonexistent/path.spec"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // malformed spec reports the line
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "[experiment\nname = x\n").unwrap();
    let out = bench(&["run", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn env_var_supplies_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("noout.spec");
    let text = "[experiment]\n\
                name = envdir\n\
                seeds = 1\n\
                budget_passes = 6\n\
                [problem]\n\
                kind = quadratic\n\
                n = 40\n\
                d = 3\n\
                lambda = 0.2\n\
                [algorithm.gd]\n\
                kind = gd\n";
    std::fs::write(&spec_path, text).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_svrg-bench"))
        .args(["run", spec_path.to_str().unwrap()])
        .env("SVRG_BENCH_OUT", dir.path().join("envout"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("envout/envdir/manifest.txt").exists());
}
