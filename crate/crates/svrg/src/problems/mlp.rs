//! One-hidden-layer perceptron with softmax cross-entropy loss.
//!
//! Parameters are flattened into a single vector in the layout
//! `[W1 (h x d), b1 (h), W2 (c x h), b2 (c)]`. The hidden activation is tanh,
//! which keeps every component infinitely differentiable so the smoothness
//! assumption stays honest. The l2 penalty applies to weights only (not
//! biases) and is included in every component, so the mean objective carries
//! it exactly once.
//!
//! There is no closed-form smoothness constant for this model; the stored
//! value is a caller-supplied heuristic (see
//! [`estimate_smoothness`](super::estimate_smoothness)) used only to scale
//! step sizes.

use crate::error::{Error, Result};
use crate::oracle::{Problem, RngStream, Vector};

pub struct MlpProblem {
    rows: Vec<Vector>,
    labels: Vec<usize>,
    input_dim: usize,
    hidden: usize,
    classes: usize,
    l2: f64,
    smoothness_hint: f64,
}

impl MlpProblem {
    pub fn new(
        rows: Vec<Vector>,
        labels: Vec<usize>,
        hidden: usize,
        classes: usize,
        l2: f64,
    ) -> Result<Self> {
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(Error::contract("need matching, nonempty rows and labels"));
        }
        if hidden == 0 || classes < 2 {
            return Err(Error::contract("need hidden >= 1 and classes >= 2"));
        }
        if labels.iter().any(|&y| y >= classes) {
            return Err(Error::contract("label out of range"));
        }
        let input_dim = rows[0].dim();
        if input_dim == 0 || rows.iter().any(|r| r.dim() != input_dim) {
            return Err(Error::contract("rows must share a positive dimension"));
        }
        if !(l2 >= 0.0) {
            return Err(Error::contract("l2 weight must be nonnegative"));
        }
        Ok(MlpProblem {
            rows,
            labels,
            input_dim,
            hidden,
            classes,
            l2,
            smoothness_hint: 1.0,
        })
    }

    /// Record a smoothness estimate; the model has no closed-form constant.
    pub fn with_smoothness(mut self, l: f64) -> Self {
        assert!(l > 0.0, "smoothness must be positive");
        self.smoothness_hint = l;
        self
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn w1_len(&self) -> usize {
        self.hidden * self.input_dim
    }

    fn w2_off(&self) -> usize {
        self.w1_len() + self.hidden
    }

    fn b2_off(&self) -> usize {
        self.w2_off() + self.classes * self.hidden
    }

    /// Normalized (fan-in + fan-out) initialization: each weight is uniform
    /// in `[-sqrt(6/(n_in + n_out)), sqrt(6/(n_in + n_out))]` for its layer;
    /// biases start at zero.
    pub fn init_params(&self, seed: u64) -> Vector {
        let mut rng = RngStream::new(seed);
        let mut params = Vector::zeros(self.dim());
        let s1 = (6.0 / (self.input_dim + self.hidden) as f64).sqrt();
        for j in 0..self.w1_len() {
            params[j] = rng.next_range(-s1, s1);
        }
        let s2 = (6.0 / (self.hidden + self.classes) as f64).sqrt();
        for j in 0..self.classes * self.hidden {
            params[self.w2_off() + j] = rng.next_range(-s2, s2);
        }
        params
    }

    /// Forward pass; returns (hidden activations, class log-probabilities
    /// shifted so softmax is stable, log-sum-exp).
    fn forward(&self, i: usize, params: &Vector) -> (Vec<f64>, Vec<f64>, f64) {
        let row = &self.rows[i];
        let (d, h, c) = (self.input_dim, self.hidden, self.classes);
        let w1 = &params.as_slice()[..self.w1_len()];
        let b1 = &params.as_slice()[self.w1_len()..self.w2_off()];
        let w2 = &params.as_slice()[self.w2_off()..self.b2_off()];
        let b2 = &params.as_slice()[self.b2_off()..];

        let mut act = vec![0.0; h];
        for u in 0..h {
            let mut z = b1[u];
            let wrow = &w1[u * d..(u + 1) * d];
            for (w, x) in wrow.iter().zip(row.iter()) {
                z += w * x;
            }
            act[u] = z.tanh();
        }
        let mut logits = vec![0.0; c];
        for k in 0..c {
            let mut z = b2[k];
            let wrow = &w2[k * h..(k + 1) * h];
            for (w, a) in wrow.iter().zip(&act) {
                z += w * a;
            }
            logits[k] = z;
        }
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        (act, logits, lse)
    }

    fn weight_penalty(&self, params: &Vector) -> f64 {
        let w1 = &params.as_slice()[..self.w1_len()];
        let w2 = &params.as_slice()[self.w2_off()..self.b2_off()];
        let sq: f64 = w1.iter().chain(w2.iter()).map(|w| w * w).sum();
        0.5 * self.l2 * sq
    }
}

impl Problem for MlpProblem {
    fn num_components(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.hidden * self.input_dim + self.hidden + self.classes * self.hidden + self.classes
    }

    fn component_value(&self, i: usize, params: &Vector) -> f64 {
        let (_, logits, lse) = self.forward(i, params);
        lse - logits[self.labels[i]] + self.weight_penalty(params)
    }

    fn component_gradient_into(&self, i: usize, params: &Vector, out: &mut Vector) {
        let (d, h, c) = (self.input_dim, self.hidden, self.classes);
        let row = &self.rows[i];
        let (act, logits, lse) = self.forward(i, params);

        let w1 = &params.as_slice()[..self.w1_len()];
        let w2 = &params.as_slice()[self.w2_off()..self.b2_off()];

        // softmax residual: p_k - 1[k == label]
        let mut dlogits = vec![0.0; c];
        for k in 0..c {
            dlogits[k] = (logits[k] - lse).exp();
        }
        dlogits[self.labels[i]] -= 1.0;

        // backprop into hidden activations, then through tanh
        let mut dact = vec![0.0; h];
        for k in 0..c {
            let wrow = &w2[k * h..(k + 1) * h];
            for u in 0..h {
                dact[u] += dlogits[k] * wrow[u];
            }
        }

        out.fill(0.0);
        let (w2_off, b2_off) = (self.w2_off(), self.b2_off());
        for k in 0..c {
            for u in 0..h {
                out[w2_off + k * h + u] = dlogits[k] * act[u] + self.l2 * w2[k * h + u];
            }
            out[b2_off + k] = dlogits[k];
        }
        for u in 0..h {
            let dz = dact[u] * (1.0 - act[u] * act[u]);
            for j in 0..d {
                out[u * d + j] = dz * row[j] + self.l2 * w1[u * d + j];
            }
            out[self.w1_len() + u] = dz;
        }
    }

    fn smoothness(&self) -> f64 {
        self.smoothness_hint
    }

    fn f_star_lower_bound(&self) -> Option<f64> {
        // cross-entropy and the weight penalty are both nonnegative
        Some(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::finite_difference_gradient;
    use crate::problems::make_synthetic_classification;

    fn toy_mlp(seed: u64) -> MlpProblem {
        let (rows, labels) = make_synthetic_classification(12, 4, 3, seed).unwrap();
        MlpProblem::new(rows, labels, 5, 3, 1e-3).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = toy_mlp(21);
        let mut rng = RngStream::new(22);
        for trial in 0..5 {
            let mut x = p.init_params(100 + trial);
            // nudge off the init manifold
            for j in 0..x.dim() {
                x[j] += 0.1 * rng.next_gaussian();
            }
            let analytic = p.full_gradient_uncounted(&x);
            let fd = finite_difference_gradient(&p, &x, 1e-6 * (1.0 + x.norm())).unwrap();
            let rel = analytic.dist_sq(&fd).sqrt() / analytic.norm().max(1e-12);
            assert!(rel < 1e-5, "trial {trial}: relative error {rel}");
        }
    }

    #[test]
    fn init_respects_fan_based_bounds() {
        let p = toy_mlp(23);
        let params = p.init_params(7);
        let s1 = (6.0 / (p.input_dim() + p.hidden()) as f64).sqrt();
        let s2 = (6.0 / (p.hidden() + p.classes()) as f64).sqrt();
        for j in 0..p.hidden() * p.input_dim() {
            assert!(params[j].abs() <= s1);
        }
        let w2_off = p.hidden() * p.input_dim() + p.hidden();
        for j in 0..p.classes() * p.hidden() {
            assert!(params[w2_off + j].abs() <= s2);
        }
        // biases zero
        for u in 0..p.hidden() {
            assert_eq!(params[p.hidden() * p.input_dim() + u], 0.0);
        }
        // same seed, same init
        assert_eq!(params, p.init_params(7));
    }

    #[test]
    fn loss_is_nonnegative() {
        let p = toy_mlp(25);
        let params = p.init_params(1);
        assert!(p.value(&params) >= 0.0);
    }
}
