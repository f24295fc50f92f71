//! Logistic loss with a smooth nonconvex regularizer.
//!
//! `f_i(x) = log(1 + exp(-y_i <a_i, x>)) + reg * sum_j x_j^2 / (1 + x_j^2)`
//!
//! The regularizer is bounded and nonconvex, so the instance exercises the
//! nonconvex code paths while keeping analytic constants: each component is
//! `L_i`-smooth with `L_i = ||a_i||^2 / 4 + 2 reg`, the objective is bounded
//! below by 0, and component gradients obey a global norm bound, making the
//! instance sigma-bounded.

use crate::error::{Error, Result};
use crate::oracle::{Problem, Vector};

use super::data::make_synthetic_classification_with_separation;

/// Largest absolute slope of `x^2/(1+x^2)`: attained at `x = 1/sqrt(3)`,
/// value `2 * (1/sqrt(3)) / (1 + 1/3)^2 = 9 / (8 sqrt(3))`.
const REG_GRAD_MAX: f64 = 0.649_519_052_838_329;

pub struct NonconvexLogisticProblem {
    rows: Vec<Vector>,
    labels: Vec<f64>,
    reg: f64,
    smoothness: f64,
    sigma: f64,
}

impl NonconvexLogisticProblem {
    pub fn new(rows: Vec<Vector>, labels: Vec<f64>, reg: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::contract("need at least one data row"));
        }
        if rows.len() != labels.len() {
            return Err(Error::contract("rows and labels must have equal length"));
        }
        if !(reg >= 0.0) {
            return Err(Error::contract("regularization weight must be nonnegative"));
        }
        let d = rows[0].dim();
        if d == 0 || rows.iter().any(|r| r.dim() != d) {
            return Err(Error::contract("rows must share a positive dimension"));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::contract("labels must be +1 or -1"));
        }
        let max_row_norm_sq = rows.iter().map(Vector::norm_sq).fold(0.0, f64::max);
        let smoothness = max_row_norm_sq / 4.0 + 2.0 * reg;
        let sigma = max_row_norm_sq.sqrt() + reg * REG_GRAD_MAX * (d as f64).sqrt();
        Ok(NonconvexLogisticProblem {
            rows,
            labels,
            reg,
            smoothness,
            sigma,
        })
    }

    /// Two-class Gaussian-blob instance; labels are mapped to +/-1.
    pub fn synthetic(n: usize, d: usize, reg: f64, separation: f64, seed: u64) -> Result<Self> {
        let (rows, classes) = make_synthetic_classification_with_separation(n, d, 2, separation, seed)?;
        let labels = classes
            .into_iter()
            .map(|c| if c == 0 { -1.0 } else { 1.0 })
            .collect();
        Self::new(rows, labels, reg)
    }

    pub fn regularization(&self) -> f64 {
        self.reg
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Numerically stable `log(1 + exp(u))`.
fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

impl Problem for NonconvexLogisticProblem {
    fn num_components(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.rows[0].dim()
    }

    fn component_value(&self, i: usize, x: &Vector) -> f64 {
        let margin = self.labels[i] * self.rows[i].dot(x);
        let mut v = softplus(-margin);
        if self.reg > 0.0 {
            let penalty: f64 = x.iter().map(|&xj| xj * xj / (1.0 + xj * xj)).sum();
            v += self.reg * penalty;
        }
        v
    }

    fn component_gradient_into(&self, i: usize, x: &Vector, out: &mut Vector) {
        let y = self.labels[i];
        let margin = y * self.rows[i].dot(x);
        // d/dz log(1+exp(-z)) = -sigmoid(-z); margins beyond +/-745 saturate
        // cleanly because exp overflows to +inf and the quotient flushes to 0.
        let s = 1.0 / (1.0 + margin.exp());
        let factor = -y * s;
        let row = &self.rows[i];
        for j in 0..out.dim() {
            let xj = x[j];
            let denom = 1.0 + xj * xj;
            out[j] = factor * row[j] + self.reg * 2.0 * xj / (denom * denom);
        }
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn sigma_bound(&self) -> Option<f64> {
        Some(self.sigma)
    }

    fn f_star_lower_bound(&self) -> Option<f64> {
        Some(0.0)
    }
}
