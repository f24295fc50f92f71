//! Strongly convex quadratic test-bed with exact constants.
//!
//! Every component shares one orthogonal eigenbasis `Q`, so each
//! `A_i = Q D_i Q^T` with a nonnegative diagonal `D_i`. That makes the mean
//! Hessian's smallest eigenvalue, the largest per-component spectral norm, the
//! global minimizer, and the optimal value all available in closed form,
//! which is what lets downstream tests assert exact inequalities instead of
//! fuzzy ones.

use crate::error::{Error, Result};
use crate::oracle::{Problem, RngStream, Vector};

pub struct QuadraticProblem {
    n: usize,
    d: usize,
    /// Orthogonal basis, row-major d x d.
    basis: Vec<f64>,
    /// Per-component eigenvalues, n x d.
    diags: Vec<f64>,
    /// Per-component linear terms b_i, n x d (original coordinates).
    linear: Vec<f64>,
    lambda: f64,
    smoothness: f64,
    minimizer: Vector,
    f_star: f64,
}

impl QuadraticProblem {
    /// Assemble from explicit parts: `f_i(x) = 0.5 x^T Q D_i Q^T x - b_i^T x`.
    pub fn from_parts(basis: Vec<f64>, diags: Vec<Vec<f64>>, linear: Vec<Vec<f64>>) -> Result<Self> {
        let n = diags.len();
        if n == 0 || linear.len() != n {
            return Err(Error::contract("need matching, nonempty diags and linear terms"));
        }
        let d = diags[0].len();
        if d == 0 || basis.len() != d * d {
            return Err(Error::contract("basis must be d x d with d >= 1"));
        }
        for (di, bi) in diags.iter().zip(&linear) {
            if di.len() != d || bi.len() != d {
                return Err(Error::contract("ragged component data"));
            }
            if di.iter().any(|&v| v < 0.0) {
                return Err(Error::contract("component eigenvalues must be nonnegative"));
            }
        }

        let mut mean_diag = vec![0.0; d];
        let mut mean_linear = vec![0.0; d];
        for i in 0..n {
            for j in 0..d {
                mean_diag[j] += diags[i][j];
                mean_linear[j] += linear[i][j];
            }
        }
        for j in 0..d {
            mean_diag[j] /= n as f64;
            mean_linear[j] /= n as f64;
        }
        let lambda = mean_diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if lambda <= 0.0 {
            return Err(Error::contract("mean Hessian must be positive definite"));
        }
        let smoothness = diags
            .iter()
            .flat_map(|di| di.iter())
            .cloned()
            .fold(0.0, f64::max);

        // Solve mean(A) x* = mean(b) in the eigenbasis.
        let mean_b = Vector::from_vec(mean_linear);
        let mut t = mat_t_vec(&basis, d, &mean_b);
        for j in 0..d {
            t[j] /= mean_diag[j];
        }
        let minimizer = mat_vec(&basis, d, &Vector::from_vec(t));
        // f(x*) = -0.5 b̄·x* because mean(A) x* = b̄.
        let f_star = -0.5 * mean_b.dot(&minimizer);

        Ok(QuadraticProblem {
            n,
            d,
            basis,
            diags: diags.into_iter().flatten().collect(),
            linear: linear.into_iter().flatten().collect(),
            lambda,
            smoothness,
            minimizer,
            f_star,
        })
    }

    /// Strong convexity modulus of the mean Hessian.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Gradient-dominance constant `tau = 1 / (2 lambda)`.
    pub fn tau(&self) -> f64 {
        1.0 / (2.0 * self.lambda)
    }

    pub fn minimizer(&self) -> &Vector {
        &self.minimizer
    }

    pub fn optimal_value(&self) -> f64 {
        self.f_star
    }

    fn diag(&self, i: usize) -> &[f64] {
        &self.diags[i * self.d..(i + 1) * self.d]
    }

    fn linear_term(&self, i: usize) -> &[f64] {
        &self.linear[i * self.d..(i + 1) * self.d]
    }
}

fn mat_vec(m: &[f64], d: usize, x: &Vector) -> Vector {
    let mut out = Vector::zeros(d);
    for r in 0..d {
        let row = &m[r * d..(r + 1) * d];
        out[r] = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

fn mat_t_vec(m: &[f64], d: usize, x: &Vector) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for r in 0..d {
        let row = &m[r * d..(r + 1) * d];
        for c in 0..d {
            out[c] += row[c] * x[r];
        }
    }
    out
}

impl Problem for QuadraticProblem {
    fn num_components(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn component_value(&self, i: usize, x: &Vector) -> f64 {
        let t = mat_t_vec(&self.basis, self.d, x);
        let quad: f64 = self
            .diag(i)
            .iter()
            .zip(&t)
            .map(|(dv, tv)| dv * tv * tv)
            .sum();
        let lin: f64 = self
            .linear_term(i)
            .iter()
            .zip(x.iter())
            .map(|(b, xv)| b * xv)
            .sum();
        0.5 * quad - lin
    }

    fn component_gradient_into(&self, i: usize, x: &Vector, out: &mut Vector) {
        // A_i x - b_i with A_i = Q D_i Q^T
        let mut t = mat_t_vec(&self.basis, self.d, x);
        for (tv, dv) in t.iter_mut().zip(self.diag(i)) {
            *tv *= dv;
        }
        let ax = mat_vec(&self.basis, self.d, &Vector::from_vec(t));
        for j in 0..self.d {
            out[j] = ax[j] - self.linear_term(i)[j];
        }
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn f_star(&self) -> Option<f64> {
        Some(self.f_star)
    }

    fn f_star_lower_bound(&self) -> Option<f64> {
        Some(self.f_star)
    }
}

/// Generate an instance whose mean Hessian has smallest eigenvalue exactly
/// `lambda_target` and whose per-component smoothness constant is exactly
/// `max(1, lambda_target)` (for `d >= 2`; the scalar case collapses to
/// `f(x) = (lambda/2) x^2`).
///
/// The linear terms are Gaussian and cancel pairwise, so the minimizer is the
/// origin and the optimal value is 0, both exact.
pub fn make_quadratic(n: usize, d: usize, lambda_target: f64, seed: u64) -> Result<QuadraticProblem> {
    if n == 0 || d == 0 {
        return Err(Error::contract("need n >= 1 and d >= 1"));
    }
    if !(lambda_target > 0.0) {
        return Err(Error::contract(format!(
            "lambda_target must be positive, got {lambda_target}"
        )));
    }
    let mut rng = RngStream::new(seed);
    let basis = random_orthogonal(d, &mut rng);

    let l_target = if d == 1 { lambda_target } else { lambda_target.max(1.0) };
    let lo = 0.5 * (lambda_target + l_target);
    let mut diags = vec![vec![lambda_target; d]; n];
    for (i, di) in diags.iter_mut().enumerate() {
        for dj in di.iter_mut().skip(1) {
            *dj = rng.next_range(lo, l_target);
        }
        if d >= 2 && i == 0 {
            di[d - 1] = l_target; // pin the spectral norm exactly
        }
    }

    // b_i in +/- pairs: the mean is exactly zero, so x* = 0 and f* = 0.
    let mut linear = vec![vec![0.0; d]; n];
    for pair in linear.chunks_exact_mut(2) {
        let (first, second) = pair.split_at_mut(1);
        for (x, y) in first[0].iter_mut().zip(second[0].iter_mut()) {
            let g = rng.next_gaussian();
            *x = g;
            *y = -g;
        }
    }

    let mut problem = QuadraticProblem::from_parts(basis, diags, linear)?;
    // The first eigen-coordinate is lambda_target in every component, so the
    // true smallest mean eigenvalue is lambda_target; replace the rounded
    // summation result with the exact value.
    debug_assert!((problem.lambda - lambda_target).abs() <= 1e-10);
    problem.lambda = lambda_target;
    Ok(problem)
}

/// Random orthogonal matrix via modified Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(d: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
        for u in &cols {
            let proj: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vj, uj) in v.iter_mut().zip(u) {
                *vj -= proj * uj;
            }
        }
        let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // degenerate draw, retry
        }
        for vj in &mut v {
            *vj /= norm;
        }
        cols.push(v);
    }
    // store columns of Q as basis columns: basis[r*d + c] = cols[c][r]
    let mut m = vec![0.0; d * d];
    for (c, col) in cols.iter().enumerate() {
        for (r, val) in col.iter().enumerate() {
            m[r * d + c] = *val;
        }
    }
    m
}
