//! Experiment execution: problem construction, schedule resolution, seeded
//! runs in parallel, and CSV/manifest artifacts.
//!
//! Every (algorithm, seed) pair runs against a fresh oracle and writes one
//! CSV with the documented header `effective_passes,ifo_calls,f_value,
//! grad_norm_sq` (a fifth `status` column appears only when a run diverged
//! mid-flight). A single manifest records the problem, the generator
//! identifier, every resolved schedule with its certificate outcome, and
//! every emitted file, so re-running an identical spec reproduces the
//! directory byte for byte.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::certificates::{
    sgd_step_size, theoretical_minibatch_params, RateCertificate, UniversalConstants,
};
use crate::error::{Error, Result};
use crate::optimizers::{
    gd_svrg_theoretical_schedule, run_gd, run_gd_svrg, run_minibatch_svrg, run_msvrg, run_sgd,
    Checkpoint, RunOptions, RunRecord, SnapshotMode, StepSizes, SvrgSchedule,
};
use crate::oracle::{Oracle, Problem, RngStream, Vector, RNG_ALGORITHM};
use crate::problems::{
    estimate_smoothness, load_libsvm, make_quadratic, make_synthetic_classification_with_separation,
    MlpProblem, NonconvexLogisticProblem,
};

use super::spec::{AlgorithmSpec, ExperimentSpec, ProblemSpec, SgdSteps, SvrgScheduleSpec};

/// Environment variable naming the default output directory for experiments
/// whose spec does not set one.
pub const OUTPUT_DIR_ENV: &str = "SVRG_BENCH_OUT";

/// A problem instance built from a [`ProblemSpec`], with the start point and
/// any known constants.
pub struct BuiltProblem {
    pub problem: Box<dyn Problem>,
    pub label: String,
    pub x0: Vector,
    pub tau: Option<f64>,
}

/// Construct the problem named by a spec, deterministically from
/// `problem_seed`. The start point policy: quadratics start at a Gaussian
/// point of scale 3, logistic at a Gaussian point of scale 1, and the
/// perceptron at its fan-based initialization.
pub fn build_problem(spec: &ProblemSpec, problem_seed: u64) -> Result<BuiltProblem> {
    let mut x0_rng = RngStream::new(problem_seed ^ 0x9e37_79b9_7f4a_7c15);
    match spec {
        ProblemSpec::Quadratic { n, d, lambda } => {
            let problem = make_quadratic(*n, *d, *lambda, problem_seed)?;
            let tau = problem.tau();
            let x0 = Vector::from_vec((0..*d).map(|_| 3.0 * x0_rng.next_gaussian()).collect());
            Ok(BuiltProblem {
                problem: Box::new(problem),
                label: spec.label(),
                x0,
                tau: Some(tau),
            })
        }
        ProblemSpec::Logistic { n, d, reg, separation, data } => {
            let problem = match data {
                Some(path) => {
                    let (rows, labels) = load_libsvm(path)?;
                    NonconvexLogisticProblem::new(rows, labels, *reg)?
                }
                None => {
                    if *n == 0 || *d == 0 {
                        return Err(Error::Spec(
                            "logistic without a data file needs n and d".into(),
                        ));
                    }
                    NonconvexLogisticProblem::synthetic(*n, *d, *reg, *separation, problem_seed)?
                }
            };
            let dim = problem.dim();
            let x0 = Vector::from_vec((0..dim).map(|_| x0_rng.next_gaussian()).collect());
            Ok(BuiltProblem {
                problem: Box::new(problem),
                label: spec.label(),
                x0,
                tau: None,
            })
        }
        ProblemSpec::Mlp { n, d, classes, hidden, l2 } => {
            let (rows, labels) =
                make_synthetic_classification_with_separation(*n, *d, *classes, 6.0, problem_seed)?;
            let problem = MlpProblem::new(rows, labels, *hidden, *classes, *l2)?;
            let smoothness = estimate_smoothness(&problem, 300, problem_seed ^ 0xa5a5)?.max(1e-6);
            let problem = problem.with_smoothness(smoothness);
            let x0 = problem.init_params(problem_seed ^ 0x5a5a);
            Ok(BuiltProblem {
                problem: Box::new(problem),
                label: spec.label(),
                x0,
                tau: None,
            })
        }
    }
}

enum ResolvedKind {
    Sgd {
        steps: usize,
        sizes: StepSizes,
        batch: usize,
    },
    Gd {
        steps: usize,
        eta: f64,
    },
    Svrg {
        schedule: SvrgSchedule,
        warm_steps: usize,
        warm_sizes: Option<StepSizes>,
    },
    GdSvrg {
        outer: usize,
        schedule: SvrgSchedule,
    },
    Msvrg {
        total_inner: usize,
        sigma: f64,
        f_gap: f64,
    },
}

/// An algorithm entry with its schedule fully resolved against the problem
/// and the IFO budget, ready to run.
pub struct ResolvedAlgorithm {
    pub name: String,
    pub echo: String,
    pub certificate: Option<RateCertificate>,
    pub notes: Vec<String>,
    kind: ResolvedKind,
}

/// Resolve every algorithm entry before any run starts. Theoretical
/// schedules must pass their certificate; explicit schedules get an advisory
/// warning in `notes` when theirs fails.
pub fn resolve_algorithms(
    spec: &ExperimentSpec,
    built: &BuiltProblem,
    constants: &UniversalConstants,
) -> Result<Vec<ResolvedAlgorithm>> {
    let n = built.problem.num_components();
    let l = built.problem.smoothness();
    let budget = spec.budget_passes;
    let mut resolved = Vec::new();

    for (name, alg) in &spec.algorithms {
        let item = match alg {
            AlgorithmSpec::Sgd { steps, batch } => {
                let total = (budget * n as f64 / *batch as f64).floor() as usize;
                if total == 0 {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] budget allows zero SGD steps"
                    )));
                }
                let sizes = match steps {
                    SgdSteps::Constant(eta) => StepSizes::Constant(*eta),
                    SgdSteps::TInverse { eta0, decay } => StepSizes::TInverse {
                        eta0: *eta0,
                        decay: *decay,
                        pass_len: n.div_ceil(*batch),
                    },
                    SgdSteps::SigmaBoundRule => {
                        let sigma = built.problem.sigma_bound().ok_or_else(|| {
                            Error::Spec(format!(
                                "[algorithm.{name}] steps = sigma-bound needs a sigma-bounded problem"
                            ))
                        })?;
                        let f_gap = built.problem.value(&built.x0)
                            - built.problem.f_star_lower_bound().unwrap_or(0.0);
                        let eta = sgd_step_size(f_gap.max(1e-12), l, sigma, total)?;
                        StepSizes::Constant(eta)
                    }
                };
                sizes.validate()?;
                ResolvedAlgorithm {
                    name: name.clone(),
                    echo: format!("kind=sgd steps={} b={batch} T={total}", sizes.echo()),
                    certificate: None,
                    notes: Vec::new(),
                    kind: ResolvedKind::Sgd { steps: total, sizes, batch: *batch },
                }
            }
            AlgorithmSpec::Gd { eta } => {
                let steps = budget.floor() as usize;
                if steps == 0 {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] budget allows zero GD steps"
                    )));
                }
                let eta = eta.unwrap_or(1.0 / l);
                ResolvedAlgorithm {
                    name: name.clone(),
                    echo: format!("kind=gd eta={eta} steps={steps}"),
                    certificate: None,
                    notes: Vec::new(),
                    kind: ResolvedKind::Gd { steps, eta },
                }
            }
            AlgorithmSpec::Svrg { schedule, batch, mode, warmstart_passes } => {
                let mut notes = Vec::new();
                let (eta, epoch_len, certificate) = match schedule {
                    SvrgScheduleSpec::Theoretical { mu } => {
                        let params = theoretical_minibatch_params(n, l, *batch, *mu)?;
                        let cert = params.certify(l)?;
                        if !cert.valid {
                            return Err(Error::Spec(format!(
                                "[algorithm.{name}] theoretical schedule failed its certificate \
                                 (gamma_n = {:.3e})",
                                cert.gamma_n
                            )));
                        }
                        (params.eta, params.epoch_len, Some(cert))
                    }
                    SvrgScheduleSpec::Explicit { eta, epoch_len } => {
                        // advisory certificate with the default analysis beta
                        let beta = l / (n as f64).powf(1.0 / 3.0);
                        let cert = crate::certificates::compute_c_sequence(
                            *eta, beta, l, *epoch_len, *batch,
                        )?;
                        if !cert.valid {
                            notes.push(format!(
                                "user schedule has no valid certificate (gamma_n = {:.3e}); \
                                 running anyway",
                                cert.gamma_n
                            ));
                        }
                        (*eta, *epoch_len, Some(cert))
                    }
                };
                let mut sched = match mode {
                    SnapshotMode::Nonconvex => SvrgSchedule::nonconvex(eta, epoch_len, 1),
                    SnapshotMode::Convex => SvrgSchedule::convex(eta, epoch_len, 1),
                };
                sched = sched.with_batch_size(*batch);

                if *warmstart_passes < 0.0 || *warmstart_passes >= budget {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] warmstart_passes must lie in [0, budget)"
                    )));
                }
                let warm_steps =
                    (warmstart_passes * n as f64 / *batch as f64).floor() as usize;
                let epoch_cost = sched.epoch_ifo_cost(n) as f64;
                let epochs = ((budget - warmstart_passes) * n as f64 / epoch_cost).floor() as usize;
                if epochs == 0 {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] budget is below one epoch ({} passes needed)",
                        epoch_cost / n as f64
                    )));
                }
                sched.total_inner = epochs * epoch_len;
                sched.validate()?;
                let warm_sizes = (warm_steps > 0).then(|| StepSizes::TInverse {
                    eta0: 0.5 / l,
                    decay: 1.0,
                    pass_len: n.div_ceil(*batch),
                });
                let echo = format!(
                    "kind=svrg {} warmstart_passes={warmstart_passes}",
                    sched.echo()
                );
                ResolvedAlgorithm {
                    name: name.clone(),
                    echo,
                    certificate,
                    notes,
                    kind: ResolvedKind::Svrg { schedule: sched, warm_steps, warm_sizes },
                }
            }
            AlgorithmSpec::GdSvrg { outer, tau } => {
                if *outer == 0 {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] needs outer >= 1"
                    )));
                }
                let tau = tau.or(built.tau).ok_or_else(|| {
                    Error::Spec(format!(
                        "[algorithm.{name}] needs tau (problem has no known \
                         gradient-dominance constant)"
                    ))
                })?;
                let (schedule, warning) =
                    gd_svrg_theoretical_schedule(n, l, tau, constants)?;
                let params = theoretical_minibatch_params(n, l, 1, constants.mu1)?;
                let cert = params.certify(l)?;
                if !cert.valid {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] theoretical schedule failed its certificate"
                    )));
                }
                let mut notes = Vec::new();
                if let Some(w) = warning {
                    notes.push(w);
                }
                ResolvedAlgorithm {
                    name: name.clone(),
                    echo: format!("kind=gd-svrg outer={outer} tau={tau} {}", schedule.echo()),
                    certificate: Some(cert),
                    notes,
                    kind: ResolvedKind::GdSvrg { outer: *outer, schedule },
                }
            }
            AlgorithmSpec::Msvrg { sigma, f_gap } => {
                let sigma = match sigma {
                    Some(s) => *s,
                    None => built.problem.sigma_bound().ok_or_else(|| {
                        Error::Spec(format!(
                            "[algorithm.{name}] needs sigma (problem has no bound)"
                        ))
                    })?,
                };
                let f_gap = match f_gap {
                    Some(g) => *g,
                    None => {
                        built.problem.value(&built.x0)
                            - built.problem.f_star_lower_bound().unwrap_or(0.0)
                    }
                };
                let epoch_len = (n as f64 / (3.0 * constants.mu1)).floor() as usize;
                let epoch_cost = (n + 2 * epoch_len) as f64;
                let epochs = (budget * n as f64 / epoch_cost).floor() as usize;
                if epoch_len == 0 || epochs == 0 {
                    return Err(Error::Spec(format!(
                        "[algorithm.{name}] budget is below one epoch"
                    )));
                }
                let total_inner = epochs * epoch_len;
                ResolvedAlgorithm {
                    name: name.clone(),
                    echo: format!("kind=msvrg sigma={sigma} f_gap={f_gap} T={total_inner}"),
                    certificate: None,
                    notes: Vec::new(),
                    kind: ResolvedKind::Msvrg { total_inner, sigma, f_gap },
                }
            }
        };
        resolved.push(item);
    }
    Ok(resolved)
}

fn run_one(
    built: &BuiltProblem,
    alg: &ResolvedAlgorithm,
    seed: u64,
    constants: &UniversalConstants,
) -> Result<RunRecord> {
    let oracle = Oracle::new(built.problem.as_ref());
    let opts = RunOptions::default();
    match &alg.kind {
        ResolvedKind::Sgd { steps, sizes, batch } => {
            run_sgd(&oracle, &built.x0, *steps, sizes, *batch, seed, &opts)
        }
        ResolvedKind::Gd { steps, eta } => run_gd(&oracle, &built.x0, *steps, *eta, &opts),
        ResolvedKind::Svrg { schedule, warm_steps, warm_sizes } => {
            if *warm_steps == 0 {
                run_minibatch_svrg(&oracle, &built.x0, schedule, seed, &opts)
            } else {
                let sizes = warm_sizes.clone().expect("warm sizes set with warm steps");
                let warm = run_sgd(
                    &oracle,
                    &built.x0,
                    *warm_steps,
                    &sizes,
                    schedule.batch_size,
                    seed,
                    &opts,
                )?;
                let mut main =
                    run_minibatch_svrg(&oracle, &warm.x_final, schedule, seed ^ 0x5eed, &opts)?;
                let mut checkpoints = warm.checkpoints;
                let warm_end_ifo = checkpoints.last().map(|c| c.ifo);
                checkpoints.extend(
                    main.checkpoints
                        .iter()
                        .skip_while(|c| Some(c.ifo) == warm_end_ifo)
                        .cloned(),
                );
                main.checkpoints = checkpoints;
                main.notes.push(format!(
                    "sgd warm start: {} steps ({} passes) before the first epoch",
                    warm_steps,
                    *warm_steps as f64 * schedule.batch_size as f64
                        / built.problem.num_components() as f64
                ));
                main.schedule = alg.echo.clone();
                Ok(main)
            }
        }
        ResolvedKind::GdSvrg { outer, schedule } => {
            run_gd_svrg(&oracle, &built.x0, *outer, schedule, seed, &opts)
        }
        ResolvedKind::Msvrg { total_inner, sigma, f_gap } => run_msvrg(
            &oracle,
            &built.x0,
            *total_inner,
            *sigma,
            *f_gap,
            constants,
            seed,
            &opts,
        ),
    }
}

/// One run's artifacts.
pub struct RunOutput {
    pub algorithm: String,
    pub seed: u64,
    pub record: RunRecord,
    pub csv_path: PathBuf,
}

pub struct ExperimentOutput {
    pub problem_label: String,
    pub runs: Vec<RunOutput>,
    pub manifest_path: PathBuf,
}

/// Execute every (algorithm, seed) pair of a spec and write the artifact
/// directory. Pairs run in parallel; outputs are ordered and written by the
/// calling thread, so the directory contents are deterministic.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out_override: Option<&Path>,
) -> Result<ExperimentOutput> {
    let out_dir = resolve_output_dir(spec, out_override)?;
    let constants = UniversalConstants::default();
    let built = build_problem(&spec.problem, spec.problem_seed)?;
    let resolved = resolve_algorithms(spec, &built, &constants)?;

    let pairs: Vec<(usize, u64)> = (0..resolved.len())
        .flat_map(|a| spec.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let results: Result<Vec<RunRecord>> = pairs
        .par_iter()
        .map(|&(a, seed)| run_one(&built, &resolved[a], seed, &constants))
        .collect();
    let records = results?;

    fs::create_dir_all(&out_dir)?;
    let mut runs = Vec::new();
    for (&(a, seed), record) in pairs.iter().zip(records) {
        let name = format!("{}-seed{}.csv", resolved[a].name, seed);
        let csv_path = out_dir.join(&name);
        write_run_csv(&csv_path, &record, spec.checkpoint_stride)?;
        runs.push(RunOutput {
            algorithm: resolved[a].name.clone(),
            seed,
            record,
            csv_path,
        });
    }

    let manifest_path = out_dir.join("manifest.txt");
    let mut manifest = String::new();
    manifest.push_str(&format!("experiment = {}\n", spec.name));
    manifest.push_str(&format!("problem = {}\n", built.label));
    if let Some(f_star) = built.problem.f_star() {
        manifest.push_str(&format!("problem.f_star = {f_star}\n"));
    }
    manifest.push_str(&format!("rng = {RNG_ALGORITHM}\n"));
    manifest.push_str(&format!("budget_passes = {}\n", spec.budget_passes));
    manifest.push_str(&format!(
        "seeds = {}\n",
        spec.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    ));
    manifest.push_str(&format!("checkpoint_stride = {}\n", spec.checkpoint_stride));
    for alg in &resolved {
        manifest.push_str(&format!("algorithm.{} = {}\n", alg.name, alg.echo));
        if let Some(cert) = &alg.certificate {
            manifest.push_str(&format!(
                "algorithm.{}.certificate = gamma_n={:.6e} valid={}\n",
                alg.name, cert.gamma_n, cert.valid
            ));
        }
        for note in &alg.notes {
            manifest.push_str(&format!("algorithm.{}.note = {}\n", alg.name, note));
        }
    }
    for run in &runs {
        manifest.push_str(&format!(
            "file.{} = {}\n",
            run.csv_path.file_name().unwrap().to_string_lossy(),
            run.record.status.label()
        ));
    }
    fs::write(&manifest_path, manifest)?;

    Ok(ExperimentOutput {
        problem_label: built.label,
        runs,
        manifest_path,
    })
}

fn resolve_output_dir(spec: &ExperimentSpec, out_override: Option<&Path>) -> Result<PathBuf> {
    if let Some(dir) = out_override {
        return Ok(dir.to_path_buf());
    }
    if let Some(dir) = &spec.output_dir {
        return Ok(dir.clone());
    }
    if let Ok(base) = std::env::var(OUTPUT_DIR_ENV) {
        return Ok(PathBuf::from(base).join(&spec.name));
    }
    Err(Error::Spec(format!(
        "no output directory: set output_dir in the spec, pass one explicitly, \
         or export {OUTPUT_DIR_ENV}"
    )))
}

/// Write one run as CSV. Checkpoints are thinned to every `stride`-th entry
/// (first and last always kept). Diverged runs gain a trailing `status`
/// column so partial data is never mistaken for a completed run.
pub fn write_run_csv(path: &Path, record: &RunRecord, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let mut file = fs::File::create(path)?;
    let diverged = record.status.is_diverged();
    if diverged {
        writeln!(file, "effective_passes,ifo_calls,f_value,grad_norm_sq,status")?;
    } else {
        writeln!(file, "effective_passes,ifo_calls,f_value,grad_norm_sq")?;
    }
    let last = record.checkpoints.len().saturating_sub(1);
    for (idx, c) in record.checkpoints.iter().enumerate() {
        if idx != 0 && idx != last && idx % stride != 0 {
            continue;
        }
        if diverged {
            let status = if idx == last { record.status.label() } else { "ok".into() };
            writeln!(
                file,
                "{},{},{},{},{}",
                c.passes, c.ifo, c.f_value, c.grad_norm_sq, status
            )?;
        } else {
            writeln!(file, "{},{},{},{}", c.passes, c.ifo, c.f_value, c.grad_norm_sq)?;
        }
    }
    Ok(())
}

/// Read a run CSV back into checkpoints (tolerates the optional `status`
/// column).
pub fn parse_run_csv(path: &Path) -> Result<Vec<Checkpoint>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty CSV".into(),
    })?;
    if !header.starts_with("effective_passes,ifo_calls,f_value,grad_norm_sq") {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected CSV header {header:?}"),
        });
    }
    let mut checkpoints = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected at least 4 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad number {s:?}"),
            })
        };
        checkpoints.push(Checkpoint {
            passes: parse_f(fields[0])?,
            ifo: fields[1].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad IFO count {:?}", fields[1]),
            })?,
            f_value: parse_f(fields[2])?,
            grad_norm_sq: parse_f(fields[3])?,
        });
    }
    Ok(checkpoints)
}
