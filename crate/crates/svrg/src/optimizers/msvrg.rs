//! MSVRG: SVRG with the mixed step-size rule.
//!
//! For a sigma-bounded instance the step size is chosen as the larger of the
//! horizon-dependent SGD value `c / sqrt(T)` (with
//! `c = sqrt(f_gap / (2 L sigma^2))`) and the fixed SVRG value
//! `mu1 / (L n^{2/3})`; the run then proceeds exactly like nonconvex SVRG
//! with that constant step. Which branch won, both candidate values, and the
//! crossover horizon are recorded on the run.

use crate::certificates::UniversalConstants;
use crate::error::{Error, Result};
use crate::oracle::{Oracle, Vector};

use super::record::{MsvrgBranch, MsvrgSelection, RunOptions, RunRecord};
use super::schedule::SvrgSchedule;
use super::svrg::svrg_loop;

/// Horizon at which the two candidate step sizes cross:
/// `T* = c^2 L^2 n^{4/3} / mu1^2`. Below it the `c / sqrt(T)` branch is
/// larger; above it the fixed SVRG step wins.
pub fn msvrg_crossover_t(c: f64, smoothness: f64, n: usize, mu1: f64) -> f64 {
    let scale = c * smoothness * (n as f64).powf(2.0 / 3.0) / mu1;
    scale * scale
}

#[allow(clippy::too_many_arguments)]
pub fn run_msvrg(
    oracle: &Oracle<'_>,
    x0: &Vector,
    total_inner: usize,
    sigma: f64,
    f_gap_estimate: f64,
    constants: &UniversalConstants,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunRecord> {
    constants.validate()?;
    if !(sigma > 0.0) {
        return Err(Error::contract(format!("sigma must be positive, got {sigma}")));
    }
    if !(f_gap_estimate > 0.0) {
        return Err(Error::contract(format!(
            "f_gap_estimate must be positive, got {f_gap_estimate}"
        )));
    }
    if total_inner == 0 {
        return Err(Error::contract("need at least one inner iteration"));
    }

    let n = oracle.num_components();
    let l = oracle.smoothness();
    let nf = n as f64;
    let epoch_len = (nf / (3.0 * constants.mu1)).floor() as usize;
    if epoch_len == 0 {
        return Err(Error::contract("epoch length floored to zero; decrease mu1"));
    }

    let c = (f_gap_estimate / (2.0 * l * sigma * sigma)).sqrt();
    let eta_sgd = c / (total_inner as f64).sqrt();
    let eta_svrg = constants.mu1 / (l * nf.powf(2.0 / 3.0));
    let (eta, branch) = if eta_sgd > eta_svrg {
        (eta_sgd, MsvrgBranch::SgdLike)
    } else {
        (eta_svrg, MsvrgBranch::SvrgConstant)
    };

    let schedule = SvrgSchedule::nonconvex(eta, epoch_len, total_inner);
    let mut record = svrg_loop(oracle, x0, &schedule, seed, opts)?;
    record.algorithm = "msvrg".into();
    let selection = MsvrgSelection {
        branch,
        eta,
        eta_sgd,
        eta_svrg,
        crossover_t: msvrg_crossover_t(c, l, n, constants.mu1),
    };
    record.notes.push(format!(
        "msvrg branch: {} (eta = {eta}, candidates sgd = {eta_sgd}, svrg = {eta_svrg})",
        match branch {
            MsvrgBranch::SgdLike => "c/sqrt(T)",
            MsvrgBranch::SvrgConstant => "fixed svrg step",
        }
    ));
    record.msvrg = Some(selection);
    Ok(record)
}
