//! Convergence-rate fitting.

use crate::error::{Error, Result};

/// Least-squares slope of `log(min-so-far grad_norm_sq)` against
/// `log(effective passes)` over the window `(lo, hi)` of passes.
///
/// The running minimum is taken over the whole series before windowing, so a
/// point's value reflects the best stationarity seen up to that point. Points
/// with nonpositive passes or minimum are excluded (logs undefined); at least
/// five points must survive.
pub fn fit_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::contract(format!("bad window [{lo}, {hi}]")));
    }
    let mut min_so_far = f64::INFINITY;
    let mut points = Vec::new();
    for &(passes, gns) in series {
        min_so_far = min_so_far.min(gns);
        if passes > 0.0 && min_so_far > 0.0 && passes >= lo && passes <= hi {
            points.push((passes.ln(), min_so_far.ln()));
        }
    }
    if points.len() < 5 {
        return Err(Error::contract(format!(
            "rate fit needs at least 5 checkpoints in the window, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::contract("all checkpoints share one pass value"));
    }
    Ok(sxy / sxx)
}
