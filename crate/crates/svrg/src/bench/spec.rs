//! Experiment specifications: a flat, diffable `key = value` text format with
//! one section per algorithm.
//!
//! ```text
//! [experiment]
//! name = quad-demo
//! seeds = 1,2,3
//! budget_passes = 30
//! problem_seed = 7
//!
//! [problem]
//! kind = quadratic
//! n = 1000
//! d = 10
//! lambda = 0.05
//!
//! [algorithm.svrg]
//! kind = svrg
//! schedule = theoretical
//!
//! [algorithm.sgd]
//! kind = sgd
//! steps = tinv:0.1,1.0
//! ```
//!
//! Problem kinds: `quadratic` (n, d, lambda), `logistic` (n, d, reg,
//! optional separation or `data = file.libsvm`), `mlp` (n, d, classes,
//! hidden, l2). Algorithm kinds and their keys are documented on
//! [`AlgorithmSpec`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::optimizers::SnapshotMode;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub seeds: Vec<u64>,
    /// Total IFO budget per run, in effective passes (IFO calls / n).
    pub budget_passes: f64,
    pub problem_seed: u64,
    /// Keep every k-th checkpoint when writing CSVs (first and last always).
    pub checkpoint_stride: usize,
    pub output_dir: Option<PathBuf>,
    pub problem: ProblemSpec,
    pub algorithms: Vec<(String, AlgorithmSpec)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Quadratic {
        n: usize,
        d: usize,
        lambda: f64,
    },
    Logistic {
        n: usize,
        d: usize,
        reg: f64,
        separation: f64,
        data: Option<PathBuf>,
    },
    Mlp {
        n: usize,
        d: usize,
        classes: usize,
        hidden: usize,
        l2: f64,
    },
}

impl ProblemSpec {
    pub fn label(&self) -> String {
        match self {
            ProblemSpec::Quadratic { n, d, lambda } => {
                format!("quadratic n={n} d={d} lambda={lambda}")
            }
            ProblemSpec::Logistic { n, d, reg, separation, data } => match data {
                Some(path) => format!("logistic data={} reg={reg}", path.display()),
                None => format!("logistic n={n} d={d} reg={reg} separation={separation}"),
            },
            ProblemSpec::Mlp { n, d, classes, hidden, l2 } => {
                format!("mlp n={n} d={d} classes={classes} hidden={hidden} l2={l2}")
            }
        }
    }
}

/// SGD step-size selection, as written in a spec file.
#[derive(Clone, Debug, PartialEq)]
pub enum SgdSteps {
    /// `constant:<eta>`
    Constant(f64),
    /// `sigma-bound`: `eta = c / sqrt(T)` from the sigma-bounded rule, using the
    /// problem's sigma bound and `f(x0)` minus its known lower bound.
    SigmaBoundRule,
    /// `tinv:<eta0>,<decay>`
    TInverse { eta0: f64, decay: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgorithmSpec {
    /// `kind = sgd`; keys: `steps` (required), `batch` (default 1).
    Sgd { steps: SgdSteps, batch: usize },
    /// `kind = gd`; keys: `eta` (default `1/L`).
    Gd { eta: Option<f64> },
    /// `kind = svrg`; keys: `schedule = theoretical | explicit`,
    /// `mu` (theoretical, default 0.25), `eta`/`m` (explicit),
    /// `batch` (default 1), `mode` (default nonconvex),
    /// `warmstart_passes` (default 0; SGD warm start billed to the budget).
    Svrg {
        schedule: SvrgScheduleSpec,
        batch: usize,
        mode: SnapshotMode,
        warmstart_passes: f64,
    },
    /// `kind = gd-svrg`; keys: `outer` (required), `tau` (default: the
    /// problem's gradient-dominance constant, when known).
    GdSvrg { outer: usize, tau: Option<f64> },
    /// `kind = msvrg`; keys: `sigma` (default auto), `f_gap` (default auto).
    Msvrg { sigma: Option<f64>, f_gap: Option<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SvrgScheduleSpec {
    Theoretical { mu: f64 },
    Explicit { eta: f64, epoch_len: usize },
}

struct Section {
    name: String,
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
    order: Vec<String>,
}

fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Parse {
                line: lineno,
                message: "unterminated section header".into(),
            })?;
            sections.push(Section {
                name: name.trim().to_string(),
                line: lineno,
                entries: BTreeMap::new(),
                order: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        let section = sections.last_mut().ok_or_else(|| Error::Parse {
            line: lineno,
            message: "key outside of any [section]".into(),
        })?;
        let key = key.trim().to_string();
        if section.entries.contains_key(&key) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate key {key:?} in [{}]", section.name),
            });
        }
        section.order.push(key.clone());
        section.entries.insert(key, (value.trim().to_string(), lineno));
    }
    Ok(sections)
}

impl Section {
    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("[{}] is missing required key {key:?}", self.name),
        })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (value, line) = self.entries.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("[{}] is missing required key {key:?}", self.name),
        })?;
        value.parse().map_err(|_| Error::Parse {
            line: *line,
            message: format!("could not parse {key} = {value:?}"),
        })
    }

    fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(_) => self.parse(key),
        }
    }

    fn check_known_keys(&self, known: &[&str]) -> Result<()> {
        for key in &self.order {
            if !known.contains(&key.as_str()) {
                let (_, line) = &self.entries[key];
                return Err(Error::Parse {
                    line: *line,
                    message: format!("unknown key {key:?} in [{}]", self.name),
                });
            }
        }
        Ok(())
    }
}

/// Parse an experiment spec from text. See the module docs for the format.
pub fn parse_experiment_spec(text: &str) -> Result<ExperimentSpec> {
    let sections = parse_sections(text)?;
    let mut experiment = None;
    let mut problem = None;
    let mut algorithms: Vec<(String, AlgorithmSpec)> = Vec::new();

    for section in &sections {
        match section.name.as_str() {
            "experiment" => {
                section.check_known_keys(&[
                    "name",
                    "seeds",
                    "budget_passes",
                    "problem_seed",
                    "checkpoint_stride",
                    "output_dir",
                ])?;
                let seeds_raw = section.require("seeds")?;
                let mut seeds = Vec::new();
                for tok in seeds_raw.split(',') {
                    let tok = tok.trim();
                    seeds.push(tok.parse::<u64>().map_err(|_| Error::Parse {
                        line: section.line,
                        message: format!("bad seed {tok:?}"),
                    })?);
                }
                if seeds.is_empty() {
                    return Err(Error::Spec("need at least one seed".into()));
                }
                experiment = Some((
                    section.require("name")?.to_string(),
                    seeds,
                    section.parse::<f64>("budget_passes")?,
                    section.parse_or::<u64>("problem_seed", 0)?,
                    section.parse_or::<usize>("checkpoint_stride", 1)?,
                    section.get("output_dir").map(PathBuf::from),
                ));
            }
            "problem" => {
                let kind = section.require("kind")?;
                let spec = match kind {
                    "quadratic" => {
                        section.check_known_keys(&["kind", "n", "d", "lambda"])?;
                        ProblemSpec::Quadratic {
                            n: section.parse("n")?,
                            d: section.parse("d")?,
                            lambda: section.parse("lambda")?,
                        }
                    }
                    "logistic" => {
                        section.check_known_keys(&["kind", "n", "d", "reg", "separation", "data"])?;
                        ProblemSpec::Logistic {
                            n: section.parse_or("n", 0)?,
                            d: section.parse_or("d", 0)?,
                            reg: section.parse("reg")?,
                            separation: section.parse_or("separation", 6.0)?,
                            data: section.get("data").map(PathBuf::from),
                        }
                    }
                    "mlp" => {
                        section.check_known_keys(&["kind", "n", "d", "classes", "hidden", "l2"])?;
                        ProblemSpec::Mlp {
                            n: section.parse("n")?,
                            d: section.parse("d")?,
                            classes: section.parse_or("classes", 2)?,
                            hidden: section.parse_or("hidden", 16)?,
                            l2: section.parse_or("l2", 1e-3)?,
                        }
                    }
                    other => {
                        return Err(Error::Parse {
                            line: section.line,
                            message: format!("unknown problem kind {other:?}"),
                        })
                    }
                };
                problem = Some(spec);
            }
            name if name.starts_with("algorithm.") => {
                let alg_name = name.trim_start_matches("algorithm.").to_string();
                if alg_name.is_empty() {
                    return Err(Error::Parse {
                        line: section.line,
                        message: "algorithm section needs a name: [algorithm.<name>]".into(),
                    });
                }
                if algorithms.iter().any(|(n, _)| *n == alg_name) {
                    return Err(Error::Parse {
                        line: section.line,
                        message: format!("duplicate algorithm name {alg_name:?}"),
                    });
                }
                algorithms.push((alg_name, parse_algorithm(section)?));
            }
            other => {
                return Err(Error::Parse {
                    line: section.line,
                    message: format!("unknown section [{other}]"),
                })
            }
        }
    }

    let (name, seeds, budget_passes, problem_seed, checkpoint_stride, output_dir) =
        experiment.ok_or_else(|| Error::Spec("missing [experiment] section".into()))?;
    let problem = problem.ok_or_else(|| Error::Spec("missing [problem] section".into()))?;
    if algorithms.is_empty() {
        return Err(Error::Spec("need at least one [algorithm.<name>] section".into()));
    }
    if !(budget_passes > 0.0) {
        return Err(Error::Spec("budget_passes must be positive".into()));
    }
    if checkpoint_stride == 0 {
        return Err(Error::Spec("checkpoint_stride must be at least 1".into()));
    }

    Ok(ExperimentSpec {
        name,
        seeds,
        budget_passes,
        problem_seed,
        checkpoint_stride,
        output_dir,
        problem,
        algorithms,
    })
}

fn parse_algorithm(section: &Section) -> Result<AlgorithmSpec> {
    let kind = section.require("kind")?;
    match kind {
        "sgd" => {
            section.check_known_keys(&["kind", "steps", "batch"])?;
            let steps_raw = section.require("steps")?;
            let steps = parse_sgd_steps(steps_raw, section.line)?;
            Ok(AlgorithmSpec::Sgd {
                steps,
                batch: section.parse_or("batch", 1)?,
            })
        }
        "gd" => {
            section.check_known_keys(&["kind", "eta"])?;
            let eta = match section.get("eta") {
                Some(_) => Some(section.parse::<f64>("eta")?),
                None => None,
            };
            Ok(AlgorithmSpec::Gd { eta })
        }
        "svrg" => {
            section.check_known_keys(&[
                "kind",
                "schedule",
                "mu",
                "eta",
                "m",
                "batch",
                "mode",
                "warmstart_passes",
            ])?;
            let schedule = match section.parse_or::<String>("schedule", "theoretical".into())?.as_str()
            {
                "theoretical" => SvrgScheduleSpec::Theoretical {
                    mu: section.parse_or("mu", 0.25)?,
                },
                "explicit" => SvrgScheduleSpec::Explicit {
                    eta: section.parse("eta")?,
                    epoch_len: section.parse("m")?,
                },
                other => {
                    return Err(Error::Parse {
                        line: section.line,
                        message: format!("schedule must be theoretical or explicit, got {other:?}"),
                    })
                }
            };
            let mode = match section.parse_or::<String>("mode", "nonconvex".into())?.as_str() {
                "nonconvex" => SnapshotMode::Nonconvex,
                "convex" => SnapshotMode::Convex,
                other => {
                    return Err(Error::Parse {
                        line: section.line,
                        message: format!("mode must be nonconvex or convex, got {other:?}"),
                    })
                }
            };
            Ok(AlgorithmSpec::Svrg {
                schedule,
                batch: section.parse_or("batch", 1)?,
                mode,
                warmstart_passes: section.parse_or("warmstart_passes", 0.0)?,
            })
        }
        "gd-svrg" => {
            section.check_known_keys(&["kind", "outer", "tau"])?;
            let tau = match section.get("tau") {
                Some(_) => Some(section.parse::<f64>("tau")?),
                None => None,
            };
            Ok(AlgorithmSpec::GdSvrg {
                outer: section.parse("outer")?,
                tau,
            })
        }
        "msvrg" => {
            section.check_known_keys(&["kind", "sigma", "f_gap"])?;
            let opt = |key: &str| -> Result<Option<f64>> {
                match section.get(key) {
                    None => Ok(None),
                    Some("auto") => Ok(None),
                    Some(_) => Ok(Some(section.parse::<f64>(key)?)),
                }
            };
            Ok(AlgorithmSpec::Msvrg {
                sigma: opt("sigma")?,
                f_gap: opt("f_gap")?,
            })
        }
        other => Err(Error::Parse {
            line: section.line,
            message: format!("unknown algorithm kind {other:?}"),
        }),
    }
}

fn parse_sgd_steps(raw: &str, line: usize) -> Result<SgdSteps> {
    if raw == "sigma-bound" {
        return Ok(SgdSteps::SigmaBoundRule);
    }
    if let Some(eta) = raw.strip_prefix("constant:") {
        let eta: f64 = eta.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad constant step size {eta:?}"),
        })?;
        return Ok(SgdSteps::Constant(eta));
    }
    if let Some(rest) = raw.strip_prefix("tinv:") {
        let (eta0, decay) = rest.split_once(',').ok_or_else(|| Error::Parse {
            line,
            message: "tinv needs eta0,decay".into(),
        })?;
        let eta0: f64 = eta0.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad tinv eta0 {eta0:?}"),
        })?;
        let decay: f64 = decay.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad tinv decay {decay:?}"),
        })?;
        return Ok(SgdSteps::TInverse { eta0, decay });
    }
    Err(Error::Parse {
        line,
        message: format!("steps must be constant:<eta>, sigma-bound, or tinv:<eta0>,<decay>; got {raw:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO: &str = "\
# comment
[experiment]
name = demo
seeds = 1, 2,3
budget_passes = 12.5
problem_seed = 9

[problem]
kind = quadratic
n = 100
d = 5
lambda = 0.1

[algorithm.svrg]
kind = svrg
schedule = theoretical

[algorithm.sgd-c]
kind = sgd
steps = constant:0.05
";

    #[test]
    fn parses_demo_spec() {
        let spec = parse_experiment_spec(DEMO).unwrap();
        assert_eq!(spec.name, "demo");
        assert_eq!(spec.seeds, vec![1, 2, 3]);
        assert_eq!(spec.budget_passes, 12.5);
        assert_eq!(spec.algorithms.len(), 2);
        assert!(matches!(spec.problem, ProblemSpec::Quadratic { n: 100, d: 5, .. }));
        match &spec.algorithms[1].1 {
            AlgorithmSpec::Sgd { steps: SgdSteps::Constant(eta), batch: 1 } => {
                assert_eq!(*eta, 0.05)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_numbers() {
        let bad = DEMO.replace("steps = constant:0.05", "steps = constant:0.05\nbogus = 1");
        match parse_experiment_spec(&bad) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("bogus")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_sections_are_spec_errors() {
        assert!(matches!(
            parse_experiment_spec("[experiment]\nname = x\nseeds = 1\nbudget_passes = 1\n"),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn tinv_and_sigma_bound_parse() {
        assert_eq!(
            parse_sgd_steps("tinv:0.1,2.0", 1).unwrap(),
            SgdSteps::TInverse { eta0: 0.1, decay: 2.0 }
        );
        assert_eq!(parse_sgd_steps("sigma-bound", 1).unwrap(), SgdSteps::SigmaBoundRule);
        assert!(parse_sgd_steps("nonsense", 1).is_err());
    }
}
