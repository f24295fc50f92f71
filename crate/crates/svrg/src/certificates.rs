//! Step-size certificates and variance diagnostics.
//!
//! Before trusting an SVRG schedule, one can *certify* it: run the backward
//! recursion
//!
//! `c_m = 0,  c_t = c_{t+1} * (1 + eta*beta + 2*eta^2*L^2/b) + eta^2*L^3/b`
//!
//! and check that every per-step margin
//!
//! `Gamma_t = eta - c_{t+1}*eta/beta - eta^2*L - 2*c_{t+1}*eta^2`
//!
//! stays positive. The smallest margin `gamma_n = min_t Gamma_t` is the
//! constant that converts a run's objective gap into a bound on the expected
//! squared gradient norm of the sampled output, so a valid certificate is a
//! convergence guarantee for the schedule, not a heuristic.
//!
//! The module also provides the closed-form schedules those guarantees
//! prescribe (general exponent, mini-batch, SGD), exact variance diagnostics
//! for the variance-reduced direction, and a gradient-dominance checker.

use crate::error::{Error, Result};
use crate::oracle::{Problem, RngStream, Vector};

/// Universal constants used by the theoretical schedules. The defaults are
/// `mu = 1/4` with certified margin constant `nu = 1/40`, for each of the
/// general (`mu0`), n^{2/3} (`mu1`), and mini-batch (`mu2`) schedules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniversalConstants {
    pub mu0: f64,
    pub nu0: f64,
    pub mu1: f64,
    pub nu1: f64,
    pub mu2: f64,
    pub nu2: f64,
}

impl Default for UniversalConstants {
    fn default() -> Self {
        UniversalConstants {
            mu0: 0.25,
            nu0: 1.0 / 40.0,
            mu1: 0.25,
            nu1: 1.0 / 40.0,
            mu2: 0.25,
            nu2: 1.0 / 40.0,
        }
    }
}

impl UniversalConstants {
    /// Constant in the MSVRG bound: `max(2 nu1 / mu1, mu1 / (2 nu1))`.
    pub fn nu_bar(&self) -> f64 {
        (2.0 * self.nu1 / self.mu1).max(self.mu1 / (2.0 * self.nu1))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, mu) in [("mu0", self.mu0), ("mu1", self.mu1), ("mu2", self.mu2)] {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(Error::contract(format!("{name} must lie in (0, 1), got {mu}")));
            }
        }
        for (name, nu) in [("nu0", self.nu0), ("nu1", self.nu1), ("nu2", self.nu2)] {
            if !(nu > 0.0) {
                return Err(Error::contract(format!("{name} must be positive, got {nu}")));
            }
        }
        Ok(())
    }
}

/// Longest recursion for which the full `c_t` / `Gamma_t` sequences are kept
/// on the certificate; beyond this only the scalars survive.
const SEQUENCE_LIMIT: usize = 16_384;

/// Result of certifying one schedule.
#[derive(Clone, Debug)]
pub struct RateCertificate {
    pub eta: f64,
    pub beta: f64,
    pub smoothness: f64,
    pub epoch_len: usize,
    pub batch_size: usize,
    /// Per-step growth `eta*beta + 2*eta^2*L^2/b`.
    pub theta: f64,
    /// Backward-recursion value at t = 0 (the largest `c_t`).
    pub c0: f64,
    /// `min_t Gamma_t`; positive iff the certificate is valid.
    pub gamma_n: f64,
    pub valid: bool,
    /// Full sequence `c_0..c_m`, kept when `m <= 16384`.
    pub c: Option<Vec<f64>>,
    /// Full sequence `Gamma_0..Gamma_{m-1}`, kept when `m <= 16384`.
    pub gamma: Option<Vec<f64>>,
    /// Problem size, echoed by the theoretical constructors.
    pub n: Option<usize>,
    /// Step exponent, echoed by the theoretical constructors.
    pub alpha: Option<f64>,
    /// Certified lower bound on `gamma_n` when the proof constants apply
    /// (`mu = 1/4` gives `nu = 1/40`).
    pub reference_bound: Option<f64>,
}

impl RateCertificate {
    pub fn csv_header() -> &'static str {
        "n,alpha,b,eta,beta,m,gamma_n,bound,valid"
    }

    pub fn csv_row(&self) -> String {
        let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v}"));
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n.map_or(String::new(), |n| n.to_string()),
            fmt_opt(self.alpha),
            self.batch_size,
            self.eta,
            self.beta,
            self.epoch_len,
            self.gamma_n,
            fmt_opt(self.reference_bound),
            self.valid
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("rate certificate\n");
        if let Some(n) = self.n {
            out.push_str(&format!("  n           = {n}\n"));
        }
        if let Some(alpha) = self.alpha {
            out.push_str(&format!("  alpha       = {alpha}\n"));
        }
        out.push_str(&format!("  eta         = {}\n", self.eta));
        out.push_str(&format!("  beta        = {}\n", self.beta));
        out.push_str(&format!("  m           = {}\n", self.epoch_len));
        out.push_str(&format!("  batch       = {}\n", self.batch_size));
        out.push_str(&format!("  L           = {}\n", self.smoothness));
        out.push_str(&format!("  theta       = {:.6e}\n", self.theta));
        out.push_str(&format!("  c0          = {:.6e}\n", self.c0));
        out.push_str(&format!("  gamma_n     = {:.6e}\n", self.gamma_n));
        if let Some(bound) = self.reference_bound {
            out.push_str(&format!("  cert. bound = {bound:.6e}\n"));
        }
        out.push_str(&format!(
            "  status      = {}\n",
            if self.valid { "VALID (all Gamma_t > 0)" } else { "INVALID" }
        ));
        out
    }
}

// Error-free transforms and a small double-double kernel. The recursion's
// growth factor `1 + theta` is kept as an unevaluated pair so that no step
// ever multiplies by a rounded value: rounding it once would drift the result
// by about `m * eps`, which is fatal for epoch lengths near 1e9.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        let e = lo - (s - hi);
        Dd { hi: s, lo: e }
    }

    fn from_sum(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        Dd::renorm(s, e + self.lo + other.lo)
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        Dd::renorm(p, e + self.hi * other.lo + self.lo * other.hi)
    }

    /// `self * (1 + theta) + w`, with the growth factor applied as the exact
    /// pair `(1, theta)`. One backward step of the certificate recursion.
    #[inline]
    fn recursion_step(self, theta: f64, w: f64) -> Dd {
        let (p, pe) = two_prod(self.hi, theta);
        let (s, se) = two_sum(self.hi, p);
        let small = self.lo + self.lo * theta + pe + se;
        let (s2, se2) = two_sum(s, w);
        Dd::renorm(s2, se2 + small)
    }
}

/// The affine map `c -> a * c + b` realized by some number of recursion
/// steps. Steps share one (theta, w), so maps compose freely.
#[derive(Clone, Copy)]
struct AffineSteps {
    a: Dd,
    b: Dd,
}

impl AffineSteps {
    /// `other` applied after `self`.
    fn then(self, other: AffineSteps) -> AffineSteps {
        AffineSteps {
            a: other.a.mul(self.a),
            b: other.a.mul(self.b).add(other.b),
        }
    }

    /// The map for `k` steps, by binary composition of the single-step map.
    fn pow(theta: f64, w: f64, mut k: usize) -> AffineSteps {
        let mut base = AffineSteps {
            a: Dd::from_sum(1.0, theta),
            b: Dd { hi: w, lo: 0.0 },
        };
        let mut acc = AffineSteps { a: Dd::ONE, b: Dd::ZERO };
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(base);
            }
            k >>= 1;
            if k > 0 {
                base = base.then(base);
            }
        }
        acc
    }
}

fn gamma_at(eta: f64, beta: f64, smoothness: f64, c_next: f64) -> f64 {
    eta - c_next * eta / beta - eta * eta * smoothness - 2.0 * c_next * eta * eta
}

/// Epoch length up to which the recursion runs literally step by step; longer
/// recursions use exact binary composition of the same affine step.
const LITERAL_LIMIT: usize = 65_536;

/// Run the certificate recursion for a constant-step schedule.
///
/// Arithmetic is compensated (double-double) throughout, so the recursion
/// agrees with [`closed_form_c0`] to full f64 accuracy even for epoch lengths
/// in the 1e9 range. Epoch lengths up to 16384 also retain the full `c_t` and
/// `Gamma_t` sequences; beyond 65536 the per-step margins are certified
/// through the monotonicity of `c_t` (the sequence decreases in `t`, so the
/// minimum margin is the one at `t = 0`).
pub fn compute_c_sequence(
    eta: f64,
    beta: f64,
    smoothness: f64,
    epoch_len: usize,
    batch_size: usize,
) -> Result<RateCertificate> {
    if !(eta > 0.0) || !(beta > 0.0) || !(smoothness > 0.0) {
        return Err(Error::contract("eta, beta, and L must be positive"));
    }
    if epoch_len == 0 || batch_size == 0 {
        return Err(Error::contract("need m >= 1 and b >= 1"));
    }
    let b = batch_size as f64;
    let theta = eta * beta + 2.0 * eta * eta * smoothness * smoothness / b;
    let increment = eta * eta * smoothness.powi(3) / b;

    let overflow = || {
        Error::CertificateOverflow(format!(
            "(1 + theta)^m overflowed at theta = {theta:.3e}, m = {epoch_len}; \
             reduce the epoch length or the step size"
        ))
    };

    let (c0, gamma_min, valid, c, gamma) = if epoch_len <= LITERAL_LIMIT {
        let keep = epoch_len <= SEQUENCE_LIMIT;
        let mut c_seq = keep.then(|| Vec::with_capacity(epoch_len + 1));
        let mut gamma_seq = keep.then(|| Vec::with_capacity(epoch_len));
        if let Some(seq) = c_seq.as_mut() {
            seq.push(0.0);
        }
        let mut c = Dd::ZERO;
        let mut gamma_min = f64::INFINITY;
        let mut valid = true;
        for _t in (0..epoch_len).rev() {
            let g = gamma_at(eta, beta, smoothness, c.hi);
            gamma_min = gamma_min.min(g);
            valid &= g > 0.0;
            if let Some(seq) = gamma_seq.as_mut() {
                seq.push(g);
            }
            c = c.recursion_step(theta, increment);
            if !c.hi.is_finite() {
                return Err(overflow());
            }
            if let Some(seq) = c_seq.as_mut() {
                seq.push(c.hi);
            }
        }
        let c_seq = c_seq.map(|mut seq| {
            seq.reverse(); // collected from c_m backward; present as c_0..c_m
            seq
        });
        let gamma_seq = gamma_seq.map(|mut seq| {
            seq.reverse();
            seq
        });
        (c.hi, gamma_min, valid, c_seq, gamma_seq)
    } else {
        // c_1 under the map for m - 1 steps from c_m = 0, then one literal
        // step to c_0. c_t decreases in t, so Gamma_0 (which sees c_1, the
        // largest c used by any margin) is the minimum margin.
        let map = AffineSteps::pow(theta, increment, epoch_len - 1);
        let c1 = map.b; // applied to zero
        let c0 = c1.recursion_step(theta, increment);
        if !c0.hi.is_finite() || !c1.hi.is_finite() {
            return Err(overflow());
        }
        let gamma_min = gamma_at(eta, beta, smoothness, c1.hi);
        (c0.hi, gamma_min, gamma_min > 0.0, None, None)
    };

    Ok(RateCertificate {
        eta,
        beta,
        smoothness,
        epoch_len,
        batch_size,
        theta,
        c0,
        gamma_n: gamma_min,
        valid,
        c,
        gamma,
        n: None,
        alpha: None,
        reference_bound: None,
    })
}

/// Closed form for the recursion's endpoint:
/// `c_0 = (eta^2 L^3 / b) * ((1 + theta)^m - 1) / theta`, evaluated through
/// `exp_m1(m * ln_1p(theta))` to stay accurate when `theta` is tiny and `m`
/// huge.
pub fn closed_form_c0(
    eta: f64,
    beta: f64,
    smoothness: f64,
    epoch_len: usize,
    batch_size: usize,
) -> f64 {
    let b = batch_size as f64;
    let theta = eta * beta + 2.0 * eta * eta * smoothness * smoothness / b;
    let increment = eta * eta * smoothness.powi(3) / b;
    let growth_minus_one = ((epoch_len as f64) * theta.ln_1p()).exp_m1();
    increment * growth_minus_one / theta
}

/// A schedule produced by one of the theoretical constructors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoreticalParams {
    pub eta: f64,
    pub beta: f64,
    pub epoch_len: usize,
    pub batch_size: usize,
    pub n: usize,
    pub alpha: f64,
    pub mu: f64,
}

impl TheoreticalParams {
    /// Certify this schedule for a problem with smoothness `l`.
    pub fn certify(&self, l: f64) -> Result<RateCertificate> {
        let mut cert =
            compute_c_sequence(self.eta, self.beta, l, self.epoch_len, self.batch_size)?;
        cert.n = Some(self.n);
        cert.alpha = Some(self.alpha);
        if self.mu == 0.25 {
            // proof constant for mu = 1/4
            let nu = 1.0 / 40.0;
            cert.reference_bound =
                Some(nu * self.batch_size as f64 / (l * (self.n as f64).powf(self.alpha)));
        }
        Ok(cert)
    }
}

/// Step exponent schedule: `eta = mu0 / (L n^alpha)`, `beta = L / n^{alpha/2}`,
/// `m = floor(n^{3 alpha / 2} / (3 mu0))`, valid for `0 < alpha <= 1` and
/// `0 < mu0 < 1`. At `alpha = 2/3` the epoch length specializes to
/// `floor(n / (3 mu0))`, computed directly so the two forms agree exactly.
pub fn theoretical_svrg_params(
    n: usize,
    l: f64,
    alpha: f64,
    mu0: f64,
) -> Result<TheoreticalParams> {
    if n == 0 {
        return Err(Error::contract("need n >= 1"));
    }
    if !(l > 0.0) {
        return Err(Error::contract("smoothness must be positive"));
    }
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::contract(format!("mu0 must lie in (0, 1), got {mu0}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::contract(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let nf = n as f64;
    let eta = mu0 / (l * nf.powf(alpha));
    let beta = l / nf.powf(alpha / 2.0);
    let m_real = if (alpha - 2.0 / 3.0).abs() < 1e-12 {
        nf / (3.0 * mu0)
    } else {
        nf.powf(1.5 * alpha) / (3.0 * mu0)
    };
    let epoch_len = m_real.floor() as usize;
    if epoch_len == 0 {
        return Err(Error::contract(format!(
            "epoch length floored to zero (n = {n}, alpha = {alpha}, mu0 = {mu0}); \
             increase n or decrease mu0"
        )));
    }
    Ok(TheoreticalParams {
        eta,
        beta,
        epoch_len,
        batch_size: 1,
        n,
        alpha,
        mu: mu0,
    })
}

/// Mini-batch schedule: `eta = mu2 b / (L n^{2/3})`, `beta = L / n^{1/3}`,
/// `m = floor(n / (3 b mu2))`, requiring `b < n^{2/3}`. With `b = 1` this
/// coincides with [`theoretical_svrg_params`] at `alpha = 2/3`.
pub fn theoretical_minibatch_params(
    n: usize,
    l: f64,
    b: usize,
    mu2: f64,
) -> Result<TheoreticalParams> {
    if n == 0 {
        return Err(Error::contract("need n >= 1"));
    }
    if !(l > 0.0) {
        return Err(Error::contract("smoothness must be positive"));
    }
    if !(mu2 > 0.0 && mu2 < 1.0) {
        return Err(Error::contract(format!("mu2 must lie in (0, 1), got {mu2}")));
    }
    let nf = n as f64;
    let n_two_thirds = nf.powf(2.0 / 3.0);
    if b == 0 || (b as f64) >= n_two_thirds {
        return Err(Error::contract(format!(
            "mini-batch size must satisfy 1 <= b < n^(2/3): b = {b}, n^(2/3) = {n_two_thirds:.3}"
        )));
    }
    let eta = mu2 * b as f64 / (l * n_two_thirds);
    let beta = l / nf.powf(1.0 / 3.0);
    let epoch_len = (nf / (3.0 * b as f64 * mu2)).floor() as usize;
    if epoch_len == 0 {
        return Err(Error::contract(format!(
            "epoch length floored to zero (n = {n}, b = {b}, mu2 = {mu2})"
        )));
    }
    Ok(TheoreticalParams {
        eta,
        beta,
        epoch_len,
        batch_size: b,
        n,
        alpha: 2.0 / 3.0,
        mu: mu2,
    })
}

/// SGD step size `eta = c / sqrt(T)` with `c = sqrt(2 f_gap / (L sigma^2))`,
/// where `f_gap` bounds `f(x0) - f(x*)`.
pub fn sgd_step_size(f_gap: f64, l: f64, sigma: f64, steps: usize) -> Result<f64> {
    if !(f_gap > 0.0) || !(l > 0.0) || !(sigma > 0.0) || steps == 0 {
        return Err(Error::contract(
            "sgd_step_size needs positive f_gap, L, sigma, and T",
        ));
    }
    let c = (2.0 * f_gap / (l * sigma * sigma)).sqrt();
    Ok(c / (steps as f64).sqrt())
}

/// Exact second moment of the variance-reduced direction together with its
/// analytic bound.
#[derive(Clone, Copy, Debug)]
pub struct VarianceDiagnostic {
    /// `E ||v||^2` over the batch draw (exact enumeration or Monte Carlo).
    pub mean_sq: f64,
    /// `2 ||grad f(x)||^2 + (2 L^2 / b) ||x - snapshot||^2`.
    pub bound: f64,
    /// Number of batches enumerated or sampled.
    pub samples: u64,
    pub exact: bool,
    /// Standard error of the estimate when Monte Carlo was used.
    pub std_error: Option<f64>,
}

const ENUMERATION_LIMIT: f64 = 1e6;

/// Exact enumeration of `E ||v||^2` for the variance-reduced direction at
/// `(x, snapshot)` with batch size `b`: all `n^b` equally likely batches
/// (draws are with replacement, so ordered tuples) are averaged. Requires
/// `n^b <= 1e6`; use [`variance_diagnostic_monte_carlo`] beyond that.
pub fn variance_diagnostic(
    problem: &dyn Problem,
    x: &Vector,
    snapshot: &Vector,
    batch_size: usize,
) -> Result<VarianceDiagnostic> {
    check_diag_inputs(problem, x, snapshot, batch_size)?;
    let n = problem.num_components();
    let tuple_count = (n as f64).powi(batch_size as i32);
    if tuple_count > ENUMERATION_LIMIT {
        return Err(Error::contract(format!(
            "enumerating {n}^{batch_size} batches exceeds the {ENUMERATION_LIMIT:.0} limit; \
             call variance_diagnostic_monte_carlo instead"
        )));
    }

    let (diffs, g) = direction_parts(problem, x, snapshot);
    let b = batch_size;
    let dim = problem.dim();

    // iterate over ordered index tuples by counting in base n
    let mut tuple = vec![0usize; b];
    let mut sum_sq = 0.0;
    let mut count = 0u64;
    let mut v = Vector::zeros(dim);
    loop {
        v.copy_from(&g);
        for &i in &tuple {
            v.axpy(1.0 / b as f64, &diffs[i]);
        }
        sum_sq += v.norm_sq();
        count += 1;

        // increment the tuple
        let mut pos = 0;
        loop {
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
            if pos == b {
                let mean_sq = sum_sq / count as f64;
                return Ok(VarianceDiagnostic {
                    mean_sq,
                    bound: direction_bound(problem, x, snapshot, batch_size),
                    samples: count,
                    exact: true,
                    std_error: None,
                });
            }
        }
    }
}

/// Monte Carlo estimate of `E ||v||^2` with a reported standard error, for
/// cases where enumeration is infeasible.
pub fn variance_diagnostic_monte_carlo(
    problem: &dyn Problem,
    x: &Vector,
    snapshot: &Vector,
    batch_size: usize,
    samples: u64,
    seed: u64,
) -> Result<VarianceDiagnostic> {
    check_diag_inputs(problem, x, snapshot, batch_size)?;
    if samples < 2 {
        return Err(Error::contract("need at least two Monte Carlo samples"));
    }
    let n = problem.num_components();
    let (diffs, g) = direction_parts(problem, x, snapshot);
    let mut rng = RngStream::new(seed);
    let mut v = Vector::zeros(problem.dim());
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        v.copy_from(&g);
        for _ in 0..batch_size {
            let i = rng.next_index(n);
            v.axpy(1.0 / batch_size as f64, &diffs[i]);
        }
        let val = v.norm_sq();
        sum += val;
        sum_sq += val * val;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok(VarianceDiagnostic {
        mean_sq: mean,
        bound: direction_bound(problem, x, snapshot, batch_size),
        samples,
        exact: false,
        std_error: Some((var / samples as f64).sqrt()),
    })
}

fn check_diag_inputs(
    problem: &dyn Problem,
    x: &Vector,
    snapshot: &Vector,
    batch_size: usize,
) -> Result<()> {
    if batch_size == 0 {
        return Err(Error::contract("batch size must be at least 1"));
    }
    for v in [x, snapshot] {
        if v.dim() != problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: problem.dim(),
                actual: v.dim(),
            });
        }
    }
    Ok(())
}

fn direction_parts(problem: &dyn Problem, x: &Vector, snapshot: &Vector) -> (Vec<Vector>, Vector) {
    let n = problem.num_components();
    let dim = problem.dim();
    let mut buf = Vector::zeros(dim);
    let mut diffs = Vec::with_capacity(n);
    for i in 0..n {
        let mut d = Vector::zeros(dim);
        problem.component_gradient_into(i, x, &mut d);
        problem.component_gradient_into(i, snapshot, &mut buf);
        d.axpy(-1.0, &buf);
        diffs.push(d);
    }
    (diffs, problem.full_gradient_uncounted(snapshot))
}

fn direction_bound(problem: &dyn Problem, x: &Vector, snapshot: &Vector, batch_size: usize) -> f64 {
    let l = problem.smoothness();
    2.0 * problem.grad_norm_sq(x) + 2.0 * l * l / batch_size as f64 * x.dist_sq(snapshot)
}

/// Analytic bound on `E ||v||^2` that holds when every component is convex:
/// `4 L (f(x) - f* + f(snapshot) - f*)`.
pub fn convex_variance_bound(
    problem: &dyn Problem,
    x: &Vector,
    snapshot: &Vector,
    f_star: f64,
) -> f64 {
    let l = problem.smoothness();
    4.0 * l * ((problem.value(x) - f_star) + (problem.value(snapshot) - f_star))
}

/// `(||z_1 + ... + z_r||^2, r * (||z_1||^2 + ... + ||z_r||^2))`: the left
/// side never exceeds the right. Diagnostic utility for aggregate directions.
pub fn sum_of_vectors_bound(vectors: &[Vector]) -> (f64, f64) {
    assert!(!vectors.is_empty(), "need at least one vector");
    let mut total = Vector::zeros(vectors[0].dim());
    let mut sq = 0.0;
    for v in vectors {
        total.axpy(1.0, v);
        sq += v.norm_sq();
    }
    (total.norm_sq(), vectors.len() as f64 * sq)
}

/// Outcome of scanning the gradient-dominance inequality
/// `f(x) - f* <= tau * ||grad f(x)||^2` over a set of points.
#[derive(Clone, Debug)]
pub struct DominanceReport {
    /// Largest observed `(f(x) - f*) / ||grad f(x)||^2`, if any point counted.
    pub worst_ratio: Option<f64>,
    pub points_checked: usize,
    /// Points skipped because `||grad f||^2 < 1e-12`.
    pub points_skipped: usize,
    /// Whether the worst ratio stayed within `tau` (with 1e-9 slack).
    pub pass: bool,
}

pub fn gradient_dominance_check(
    problem: &dyn Problem,
    f_star: f64,
    tau: f64,
    points: &[Vector],
) -> DominanceReport {
    let mut worst: Option<f64> = None;
    let mut skipped = 0;
    let mut checked = 0;
    for x in points {
        let gns = problem.grad_norm_sq(x);
        if gns < 1e-12 {
            skipped += 1;
            continue;
        }
        let ratio = (problem.value(x) - f_star) / gns;
        worst = Some(worst.map_or(ratio, |w: f64| w.max(ratio)));
        checked += 1;
    }
    DominanceReport {
        worst_ratio: worst,
        points_checked: checked,
        points_skipped: skipped,
        pass: worst.is_none_or(|w| w <= tau + 1e-9),
    }
}
