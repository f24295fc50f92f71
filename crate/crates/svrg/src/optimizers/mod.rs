//! Deterministic seeded optimizers over an attached [`Oracle`](crate::Oracle).
//!
//! Every run function takes an oracle, a start point, a schedule, a seed, and
//! [`RunOptions`], and produces a [`RunRecord`]. Runs are single-threaded
//! deterministic state machines: equal seeds and schedules give identical
//! records. Divergence (non-finite or absurdly large iterates) aborts the run
//! and returns the partial record with a [`RunStatus::Diverged`] marker
//! rather than an error.

mod gd_svrg;
mod msvrg;
mod record;
mod schedule;
mod sgd;
mod svrg;

pub use gd_svrg::{gd_svrg_theoretical_schedule, run_gd_svrg};
pub use msvrg::{msvrg_crossover_t, run_msvrg};
pub use record::{
    Checkpoint, MsvrgBranch, MsvrgSelection, RunOptions, RunRecord, RunStatus, DIVERGENCE_LIMIT,
};
pub use schedule::{SnapshotMode, StepSizes, SvrgSchedule};
pub use sgd::{run_gd, run_sgd};
pub use svrg::{run_minibatch_svrg, run_svrg};
