//! Run records: the common output of every optimizer.

use crate::oracle::{Oracle, Problem, Vector, RNG_ALGORITHM};

/// One instrumentation sample. The objective value and squared gradient norm
/// are measured with uncounted oracle calls, so recording a checkpoint never
/// changes the IFO ledger or the iterate sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// Ledger reading (component-gradient evaluations so far).
    pub ifo: u64,
    /// `ifo / n`.
    pub passes: f64,
    pub f_value: f64,
    pub grad_norm_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// The iterate left the trust region (non-finite or larger than the
    /// divergence limit) at this inner step; the record is partial.
    Diverged { step: u64 },
}

impl RunStatus {
    pub fn is_diverged(&self) -> bool {
        matches!(self, RunStatus::Diverged { .. })
    }

    pub fn label(&self) -> String {
        match self {
            RunStatus::Completed => "completed".into(),
            RunStatus::Diverged { step } => format!("diverged@{step}"),
        }
    }
}

/// Which branch of the MSVRG step-size rule was active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsvrgBranch {
    /// `c / sqrt(T)` won the max.
    SgdLike,
    /// The fixed `mu1 / (L n^{2/3})` step won the max.
    SvrgConstant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MsvrgSelection {
    pub branch: MsvrgBranch,
    pub eta: f64,
    pub eta_sgd: f64,
    pub eta_svrg: f64,
    /// Iteration count at which the two candidate step sizes cross.
    pub crossover_t: f64,
}

/// Time series and outputs of one optimizer run. Equal seeds and equal
/// schedules produce equal records, including the sampled output iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    /// Identifier of the index-sampling generator ("chacha8").
    pub rng_algorithm: String,
    /// Human-readable `key=value` echo of the schedule that produced the run.
    pub schedule: String,
    pub status: RunStatus,
    pub checkpoints: Vec<Checkpoint>,
    /// The sampled output iterate `x_a` (final iterate for SGD/GD).
    pub x_output: Vector,
    /// Final snapshot / final iterate.
    pub x_final: Vector,
    pub ifo_total: u64,
    pub notes: Vec<String>,
    pub msvrg: Option<MsvrgSelection>,
    /// Per-inner-step iterates, captured only on request
    /// ([`RunOptions::capture_trajectory`]); index 0 is the start point.
    pub trajectory: Option<Vec<Vector>>,
}

impl RunRecord {
    pub(crate) fn new(algorithm: &str, seed: u64, schedule: String, x0: &Vector) -> Self {
        RunRecord {
            algorithm: algorithm.to_string(),
            seed,
            rng_algorithm: RNG_ALGORITHM.to_string(),
            schedule,
            status: RunStatus::Completed,
            checkpoints: Vec::new(),
            x_output: x0.clone(),
            x_final: x0.clone(),
            ifo_total: 0,
            notes: Vec::new(),
            msvrg: None,
            trajectory: None,
        }
    }

    pub fn final_grad_norm_sq(&self) -> Option<f64> {
        self.checkpoints.last().map(|c| c.grad_norm_sq)
    }

    pub fn min_grad_norm_sq(&self) -> Option<f64> {
        self.checkpoints
            .iter()
            .map(|c| c.grad_norm_sq)
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.min(v))))
    }

    /// First ledger reading at which the running minimum of the recorded
    /// squared gradient norms drops to `eps`, if it ever does.
    pub fn ifo_to_reach(&self, eps: f64) -> Option<u64> {
        for c in &self.checkpoints {
            if c.grad_norm_sq <= eps {
                return Some(c.ifo);
            }
        }
        None
    }

    /// `(passes, grad_norm_sq)` series, for rate fitting.
    pub fn gradient_series(&self) -> Vec<(f64, f64)> {
        self.checkpoints
            .iter()
            .map(|c| (c.passes, c.grad_norm_sq))
            .collect()
    }
}

/// Options shared by all run functions. The defaults record one checkpoint
/// per epoch (per pass for SGD) and keep no trajectory.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Capture every inner iterate (including the start point) in the record.
    /// Intended for equivalence tests and small runs only.
    pub capture_trajectory: bool,
}

impl RunOptions {
    pub fn trajectory() -> Self {
        RunOptions {
            capture_trajectory: true,
        }
    }
}

/// Iterates whose magnitude exceeds this are treated as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

pub(crate) fn measure(problem: &dyn Problem, oracle: &Oracle<'_>, x: &Vector) -> Checkpoint {
    Checkpoint {
        ifo: oracle.ifo_count(),
        passes: oracle.effective_passes(),
        f_value: problem.value(x),
        grad_norm_sq: problem.grad_norm_sq(x),
    }
}

pub(crate) fn iterate_ok(x: &Vector) -> bool {
    x.is_finite() && x.max_abs() <= DIVERGENCE_LIMIT
}
