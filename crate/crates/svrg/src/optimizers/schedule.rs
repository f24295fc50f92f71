//! Step-size schedules for the SVRG family and for SGD.

use crate::error::{Error, Result};

/// How the epoch snapshot is formed from the inner iterates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapshotMode {
    /// Snapshot is the last inner iterate (`p_m = 1`).
    Nonconvex,
    /// Snapshot is the average of the first `m` inner iterates
    /// (`p_i = 1/m` for `i < m`, `p_m = 0`).
    Convex,
}

impl SnapshotMode {
    pub fn label(&self) -> &'static str {
        match self {
            SnapshotMode::Nonconvex => "nonconvex",
            SnapshotMode::Convex => "convex",
        }
    }
}

/// Parameters of one SVRG run: per-inner-step step sizes, epoch length `m`,
/// snapshot weights `p_0..p_m`, mini-batch size, and total inner iteration
/// budget `T`. Runs always execute `ceil(T / m)` full epochs.
#[derive(Clone, Debug, PartialEq)]
pub struct SvrgSchedule {
    pub eta: Vec<f64>,
    pub epoch_len: usize,
    pub snapshot_dist: Vec<f64>,
    pub batch_size: usize,
    pub total_inner: usize,
    pub mode: SnapshotMode,
}

impl SvrgSchedule {
    /// Constant step size with the last-iterate snapshot.
    pub fn nonconvex(eta: f64, epoch_len: usize, total_inner: usize) -> Self {
        let mut dist = vec![0.0; epoch_len + 1];
        dist[epoch_len] = 1.0;
        SvrgSchedule {
            eta: vec![eta; epoch_len],
            epoch_len,
            snapshot_dist: dist,
            batch_size: 1,
            total_inner,
            mode: SnapshotMode::Nonconvex,
        }
    }

    /// Constant step size with the averaged snapshot.
    pub fn convex(eta: f64, epoch_len: usize, total_inner: usize) -> Self {
        let mut dist = vec![1.0 / epoch_len as f64; epoch_len + 1];
        dist[epoch_len] = 0.0;
        SvrgSchedule {
            eta: vec![eta; epoch_len],
            epoch_len,
            snapshot_dist: dist,
            batch_size: 1,
            total_inner,
            mode: SnapshotMode::Convex,
        }
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn with_step_sizes(mut self, eta: Vec<f64>) -> Self {
        self.eta = eta;
        self
    }

    /// Number of full epochs a run will execute.
    pub fn epochs(&self) -> usize {
        self.total_inner.div_ceil(self.epoch_len)
    }

    /// IFO cost of one epoch: a full gradient plus `2b` per inner update.
    pub fn epoch_ifo_cost(&self, n: usize) -> u64 {
        n as u64 + 2 * (self.batch_size * self.epoch_len) as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.epoch_len == 0 {
            return Err(Error::contract("epoch length must be at least 1"));
        }
        if self.total_inner == 0 {
            return Err(Error::contract("total inner iterations must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::contract("batch size must be at least 1"));
        }
        if self.eta.len() != self.epoch_len {
            return Err(Error::contract(format!(
                "need one step size per inner step: got {} for m = {}",
                self.eta.len(),
                self.epoch_len
            )));
        }
        if self.eta.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::contract("step sizes must be positive and finite"));
        }
        if self.snapshot_dist.len() != self.epoch_len + 1 {
            return Err(Error::contract(format!(
                "snapshot distribution needs m + 1 = {} entries, got {}",
                self.epoch_len + 1,
                self.snapshot_dist.len()
            )));
        }
        if self.snapshot_dist.iter().any(|&p| p < 0.0) {
            return Err(Error::contract("snapshot probabilities must be nonnegative"));
        }
        let total: f64 = self.snapshot_dist.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::contract(format!(
                "snapshot probabilities must sum to 1, got {total}"
            )));
        }
        let m = self.epoch_len;
        let canonical = match self.mode {
            SnapshotMode::Nonconvex => {
                self.snapshot_dist[m] == 1.0
                    && self.snapshot_dist[..m].iter().all(|&p| p == 0.0)
            }
            SnapshotMode::Convex => {
                self.snapshot_dist[m] == 0.0
                    && self
                        .snapshot_dist[..m]
                        .iter()
                        .all(|&p| (p - 1.0 / m as f64).abs() <= 1e-12)
            }
        };
        if !canonical {
            return Err(Error::contract(
                "snapshot distribution does not match the declared mode",
            ));
        }
        Ok(())
    }

    /// Constant step size if all inner steps share one, else the range.
    pub fn eta_echo(&self) -> String {
        let first = self.eta[0];
        if self.eta.iter().all(|&e| e == first) {
            format!("{first}")
        } else {
            let lo = self.eta.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = self.eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            format!("[{lo},{hi}]")
        }
    }

    pub fn echo(&self) -> String {
        format!(
            "eta={} m={} b={} T={} snapshot={}",
            self.eta_echo(),
            self.epoch_len,
            self.batch_size,
            self.total_inner,
            self.mode.label()
        )
    }
}

/// SGD step-size sequences.
#[derive(Clone, Debug, PartialEq)]
pub enum StepSizes {
    Constant(f64),
    /// `eta_t = eta0 * (1 + decay * floor(t / pass_len))^(-1)`; the decay
    /// clock ticks once per pass through the data.
    TInverse {
        eta0: f64,
        decay: f64,
        pass_len: usize,
    },
}

impl StepSizes {
    pub fn at(&self, t: usize) -> f64 {
        match self {
            StepSizes::Constant(eta) => *eta,
            StepSizes::TInverse { eta0, decay, pass_len } => {
                eta0 / (1.0 + decay * (t / pass_len) as f64)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            StepSizes::Constant(eta) => *eta > 0.0 && eta.is_finite(),
            StepSizes::TInverse { eta0, decay, pass_len } => {
                *eta0 > 0.0 && eta0.is_finite() && *decay >= 0.0 && *pass_len > 0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::contract("invalid SGD step-size schedule"))
        }
    }

    pub fn echo(&self) -> String {
        match self {
            StepSizes::Constant(eta) => format!("constant:{eta}"),
            StepSizes::TInverse { eta0, decay, pass_len } => {
                format!("tinv:{eta0},{decay},per{pass_len}")
            }
        }
    }
}
