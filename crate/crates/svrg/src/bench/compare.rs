//! Comparison tables across algorithms and seeds.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::optimizers::Checkpoint;

use super::fit::fit_rate;
use super::runner::parse_run_csv;

/// Stationarity targets for the "IFO calls to reach epsilon" ladder.
pub const EPS_LADDER: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// One run, tagged with the problem it was measured on. Tables are strictly
/// per-problem; mixing problems is a contract violation.
#[derive(Clone, Debug)]
pub struct TaggedRun {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    /// Known optimal value, when the problem has one (closed-form
    /// quadratics); enables optimality-gap columns.
    pub f_star: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub algorithm: String,
    pub seeds: usize,
    pub median_final_gns: f64,
    /// Lower and upper quartile of the final squared gradient norm.
    pub final_quartiles: (f64, f64),
    pub median_min_gns: f64,
    /// Median final optimality gap `f - f*`, reported only when the problem
    /// has a known optimal value.
    pub median_final_gap: Option<f64>,
    /// Median IFO count to reach each ladder target; `None` means the median
    /// run did not reach it within budget (never extrapolated).
    pub ifo_to_eps: Vec<Option<u64>>,
    /// Median fitted rate exponent across seeds, when fittable.
    pub rate_exponent: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ComparisonTable {
    pub problem: String,
    pub rows: Vec<ComparisonRow>,
}

/// Build a per-problem comparison table. Rows are computed only from run
/// records: medians and quartiles of the final and minimum squared gradient
/// norms over seeds, the IFO cost to reach each ladder target, and the fitted
/// log-log rate exponent.
pub fn compare_runs(runs: &[TaggedRun]) -> Result<ComparisonTable> {
    if runs.is_empty() {
        return Err(Error::contract("no runs to compare"));
    }
    let problem = runs[0].problem.clone();
    if runs.iter().any(|r| r.problem != problem) {
        return Err(Error::contract(
            "comparison tables are per-problem; got runs from different problems",
        ));
    }

    let mut order: Vec<String> = Vec::new();
    let mut by_alg: BTreeMap<String, Vec<&TaggedRun>> = BTreeMap::new();
    for run in runs {
        if !by_alg.contains_key(&run.algorithm) {
            order.push(run.algorithm.clone());
        }
        by_alg.entry(run.algorithm.clone()).or_default().push(run);
    }

    let mut rows = Vec::new();
    for alg in order {
        let group = &by_alg[&alg];
        let mut finals = Vec::new();
        let mut mins = Vec::new();
        let mut slopes = Vec::new();
        let mut gaps = Vec::new();
        let mut ladder: Vec<Vec<Option<u64>>> = vec![Vec::new(); EPS_LADDER.len()];
        for run in group {
            let cps = &run.checkpoints;
            if cps.is_empty() {
                continue;
            }
            finals.push(cps.last().unwrap().grad_norm_sq);
            if let Some(f_star) = run.f_star {
                gaps.push(cps.last().unwrap().f_value - f_star);
            }
            let mut min_so_far = f64::INFINITY;
            let mut reach = vec![None; EPS_LADDER.len()];
            for c in cps {
                min_so_far = min_so_far.min(c.grad_norm_sq);
                for (k, &eps) in EPS_LADDER.iter().enumerate() {
                    if reach[k].is_none() && min_so_far <= eps {
                        reach[k] = Some(c.ifo);
                    }
                }
            }
            mins.push(min_so_far);
            for (k, r) in reach.into_iter().enumerate() {
                ladder[k].push(r);
            }
            let series: Vec<(f64, f64)> = cps.iter().map(|c| (c.passes, c.grad_norm_sq)).collect();
            let hi = cps.last().unwrap().passes;
            if let Ok(slope) = fit_rate(&series, (0.0, hi + 1.0)) {
                slopes.push(slope);
            }
        }
        if finals.is_empty() {
            continue;
        }
        rows.push(ComparisonRow {
            algorithm: alg,
            seeds: finals.len(),
            median_final_gns: median_f64(&mut finals.clone()),
            final_quartiles: quartiles(&mut finals.clone()),
            median_min_gns: median_f64(&mut mins.clone()),
            median_final_gap: (gaps.len() == finals.len())
                .then(|| median_f64(&mut gaps.clone())),
            ifo_to_eps: ladder.into_iter().map(|v| median_reach(&v)).collect(),
            rate_exponent: (!slopes.is_empty()).then(|| median_f64(&mut slopes.clone())),
        });
    }

    Ok(ComparisonTable { problem, rows })
}

/// Build a comparison table from an experiment output directory (reads the
/// manifest and every referenced CSV).
pub fn compare_dir(dir: &Path) -> Result<ComparisonTable> {
    let manifest_path = dir.join("manifest.txt");
    let text = std::fs::read_to_string(&manifest_path).map_err(|e| {
        Error::Spec(format!("cannot read {}: {e}", manifest_path.display()))
    })?;
    let mut problem = None;
    let mut f_star = None;
    let mut runs = Vec::new();
    for line in text.lines() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "problem" {
            problem = Some(value.to_string());
        }
        if key == "problem.f_star" {
            f_star = value.parse::<f64>().ok();
        }
        if let Some(fname) = key.strip_prefix("file.") {
            let (alg, seed) = split_run_filename(fname)?;
            let checkpoints = parse_run_csv(&dir.join(fname))?;
            runs.push(TaggedRun {
                problem: problem.clone().unwrap_or_default(),
                algorithm: alg,
                seed,
                checkpoints,
                f_star,
            });
        }
    }
    if runs.is_empty() {
        return Err(Error::Spec(format!(
            "manifest {} references no run files",
            manifest_path.display()
        )));
    }
    compare_runs(&runs)
}

fn split_run_filename(fname: &str) -> Result<(String, u64)> {
    let stem = fname.strip_suffix(".csv").unwrap_or(fname);
    let (alg, seed) = stem.rsplit_once("-seed").ok_or_else(|| {
        Error::Spec(format!("run file name {fname:?} is not <alg>-seed<seed>.csv"))
    })?;
    let seed: u64 = seed.parse().map_err(|_| {
        Error::Spec(format!("run file name {fname:?} has a non-numeric seed"))
    })?;
    Ok((alg.to_string(), seed))
}

impl ComparisonTable {
    pub fn csv_header() -> String {
        let ladder: Vec<String> = EPS_LADDER.iter().map(|e| format!("ifo_to_{e:.0e}")).collect();
        format!(
            "algorithm,seeds,median_final_gns,q1_final,q3_final,median_min_gns,\
             median_final_gap,{},rate_exponent",
            ladder.join(",")
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header();
        out.push('\n');
        for row in &self.rows {
            let ladder: Vec<String> = row
                .ifo_to_eps
                .iter()
                .map(|v| v.map_or("not reached".to_string(), |u| u.to_string()))
                .collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.algorithm,
                row.seeds,
                row.median_final_gns,
                row.final_quartiles.0,
                row.final_quartiles.1,
                row.median_min_gns,
                row.median_final_gap.map_or(String::from("n/a"), |g| format!("{g}")),
                ladder.join(","),
                row.rate_exponent.map_or(String::from("n/a"), |s| format!("{s:.4}")),
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("problem: {}\n", self.problem);
        out.push_str(&format!(
            "{:<18} {:>6} {:>13} {:>27} {:>13} {:>13} {:>9}\n",
            "algorithm", "seeds", "final gns", "final IQR", "min gns", "final gap", "slope"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<18} {:>6} {:>13.4e} [{:>11.4e},{:>11.4e}] {:>13.4e} {:>13} {:>9}\n",
                row.algorithm,
                row.seeds,
                row.median_final_gns,
                row.final_quartiles.0,
                row.final_quartiles.1,
                row.median_min_gns,
                row.median_final_gap
                    .map_or(String::from("n/a"), |g| format!("{g:.4e}")),
                row.rate_exponent.map_or(String::from("n/a"), |s| format!("{s:.3}")),
            ));
        }
        out.push_str("IFO calls to reach target stationarity:\n");
        let header: Vec<String> = EPS_LADDER.iter().map(|e| format!("{e:>12.0e}")).collect();
        out.push_str(&format!("{:<18} {}\n", "algorithm", header.join(" ")));
        for row in &self.rows {
            let cells: Vec<String> = row
                .ifo_to_eps
                .iter()
                .map(|v| match v {
                    Some(u) => format!("{u:>12}"),
                    None => format!("{:>12}", "not reached"),
                })
                .collect();
            out.push_str(&format!("{:<18} {}\n", row.algorithm, cells.join(" ")));
        }
        out
    }
}

fn median_f64(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in summaries"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Tukey hinges: medians of the lower and upper halves.
fn quartiles(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in summaries"));
    let n = values.len();
    if n == 1 {
        return (values[0], values[0]);
    }
    let half = n.div_ceil(2);
    let q1 = median_f64(&mut values[..half].to_vec());
    let q3 = median_f64(&mut values[n - half..].to_vec());
    (q1, q3)
}

/// Median of "IFO to reach" values; `None` (not reached) sorts as infinity,
/// and the result is `None` when at least half the seeds never reached it.
fn median_reach(values: &[Option<u64>]) -> Option<u64> {
    let mut reached: Vec<u64> = values.iter().flatten().copied().collect();
    if reached.len() * 2 <= values.len() {
        return None;
    }
    reached.sort_unstable();
    // with more than half reached, the median index falls inside `reached`
    let n = values.len();
    if n % 2 == 1 {
        Some(reached[n / 2])
    } else {
        let upper = reached[n / 2];
        let lower = if n / 2 >= 1 { reached[n / 2 - 1] } else { upper };
        Some((lower + upper) / 2)
    }
}
