//! Reference formulas: threshold densities, expected counts, the
//! log-normal small-subgraph correction law, and the Poisson mixture that
//! describes the count at fixed expectation.
//!
//! The scaling regime is p = c lambda e^s / n^s. In that regime the
//! expected cycle count E[Z] = N_C p^m stays bounded away from 0 and
//! infinity in the exponential sense, and the fluctuations of log Z are
//! carried by the path statistics Y_k with weights
//!
//!   t_k = sqrt(A_k c^{-k} e^{-k s}) / s,
//!
//! so that Z / E[Z] is asymptotically exp(N) with N normal of mean
//! -sigma^2/2 and variance sigma^2 = sum_k t_k^2. The series converges
//! exactly when c e^s > 1; truncating at K leaves a tail bounded through
//! the stabilized A_k value. All A_k come from brute force, never from an
//! assumed pattern.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::aut::{compute_a_table, cycle_copies, path_copies_f64};
use crate::error::{Error, Result};
use crate::params::derive_constants;

/// Threshold-scaled edge probability p = c lambda e^s / n^s.
pub fn p_star(n: usize, r: usize, ell: usize, c: f64) -> Result<f64> {
    let shape = derive_constants(r, ell)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParams(format!("scale c={c} must be positive")));
    }
    let s = shape.step as f64;
    Ok(c * shape.lambda as f64 * s.exp() / (n as f64).powf(s))
}

/// Inverse of `p_star` in c: the finite-n scale a given p corresponds to.
pub fn plugin_scale(n: usize, r: usize, ell: usize, p: f64) -> Result<f64> {
    let base = p_star(n, r, ell, 1.0)?;
    if !(p > 0.0) {
        return Err(Error::InvalidParams("p must be positive to infer a scale".into()));
    }
    Ok(p / base)
}

/// E[Z] = N_C p^m, exact, along with its f64 image.
pub fn expected_z(n: usize, r: usize, ell: usize, p: f64) -> Result<(BigRational, f64)> {
    let shape = derive_constants(r, ell)?;
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParams(format!("p={p} must lie in [0, 1]")));
    }
    let m = n / shape.step;
    let n_c = cycle_copies(n, r, ell)?;
    let p_rat = BigRational::from_float(p)
        .map(Ok)
        .unwrap_or_else(|| {
            if p == 0.0 {
                Ok(BigRational::zero())
            } else {
                Err(Error::InvalidParams("p is not finite".into()))
            }
        })?;
    let mut pw = BigRational::from_integer(1.into());
    for _ in 0..m {
        pw *= &p_rat;
    }
    let exact = BigRational::from_integer(n_c.into()) * pw;
    let approx = exact
        .to_f64()
        .ok_or_else(|| Error::Numeric("expected count does not fit in f64".into()))?;
    Ok((exact, approx))
}

/// The p at which E[Z] equals `target`: (target / N_C)^{1/m}.
pub fn p_for_expectation(n: usize, r: usize, ell: usize, target: f64) -> Result<f64> {
    let shape = derive_constants(r, ell)?;
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidParams(format!("target expectation {target} must be positive")));
    }
    let m = (n / shape.step) as f64;
    let n_c = cycle_copies(n, r, ell)?
        .to_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Numeric("copy count exceeds f64 range".into()))?;
    let p = (target / n_c).powf(1.0 / m);
    if p > 1.0 {
        return Err(Error::Infeasible(format!(
            "E[Z] = {target} is unreachable: even the complete graph gives only {n_c}"
        )));
    }
    Ok(p)
}

/// Exact planted-model mean of Y_j: only the paths lying inside the
/// planted cycle survive centering, m of them, each contributing
/// (1-p)^j / (N_j (p(1-p))^j)^{1/2}.
pub fn planted_y_mean(n: usize, r: usize, ell: usize, p: f64, j: usize) -> Result<f64> {
    let shape = derive_constants(r, ell)?;
    let m = (n / shape.step) as f64;
    let n_j = path_copies_f64(n, r, ell, j)?;
    if n_j == 0.0 {
        return Err(Error::InvalidParams(format!("no path with {j} edges fits on {n} vertices")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams("planted mean needs 0 < p < 1".into()));
    }
    Ok(m * ((1.0 - p) / p).powi(j as i32).sqrt() / n_j.sqrt())
}

/// Finite-n counterpart of the variance series: the sum of squared exact
/// planted means sum_k (m w_k)^2 up to k_max. For l = 2 this approaches
/// sigma2 of the limit law; for l >= 3 it carries the n^{2-l} decay and
/// is the exact exponent in the finite-n second-moment ratio.
pub fn finite_size_sigma2(n: usize, r: usize, ell: usize, p: f64, k_max: usize) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::InvalidParams("k_max must be at least 1".into()));
    }
    let mut acc = 0.0;
    for j in 1..=k_max {
        let w = planted_y_mean(n, r, ell, p, j)?;
        acc += w * w;
    }
    Ok(acc)
}

/// Default truncation level for tail-certified limit parameters: far
/// enough beyond stabilization that the geometric tail is tiny.
pub fn default_truncation(r: usize, ell: usize) -> Result<usize> {
    let table = compute_a_table(r, ell, 8)?;
    let k_stab = table.k_stab.ok_or_else(|| {
        Error::ResourceLimit(format!(
            "A_k for r={r} l={ell} shows no stable run within brute-force range"
        ))
    })?;
    Ok((k_stab + 5).max(8))
}

/// The truncated limit law for log(Z / E[Z]).
#[derive(Debug, Clone, Serialize)]
pub struct LimitLaw {
    pub r: usize,
    pub ell: usize,
    pub c: f64,
    pub k: usize,
    /// Combination weights t_1 .. t_K.
    pub weights: Vec<f64>,
    /// Truncated variance sum of t_j^2.
    pub sigma2: f64,
    /// Mean -sigma2 / 2 of the limiting normal.
    pub mu: f64,
    /// Bound on the variance mass beyond K.
    pub tail: f64,
    /// The brute-forced A_k values backing the weights.
    pub a_values: Vec<u64>,
    pub k_stab: Option<usize>,
}

/// Build the truncated law at level K. Requires c e^s > 1 (otherwise the
/// variance series diverges) and enough A_k information: brute-forceable
/// values for k <= K or an observed stabilization.
pub fn limit_law(r: usize, ell: usize, c: f64, k: usize) -> Result<LimitLaw> {
    let shape = derive_constants(r, ell)?;
    if k == 0 {
        return Err(Error::InvalidParams("truncation level K must be at least 1".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParams(format!("scale c={c} must be positive")));
    }
    let s = shape.step as f64;
    let growth = c * s.exp();
    if growth <= 1.0 {
        return Err(Error::Infeasible(format!(
            "variance series needs c e^s > 1, got {growth:.6}"
        )));
    }
    // The tail bound needs the stabilized A value even when K is small,
    // so ask for a few terms past K (the table stops early at its own
    // brute-force budget regardless).
    let table = compute_a_table(r, ell, k.max(6))?;
    let mut weights = Vec::with_capacity(k);
    let mut sigma2 = 0.0;
    for j in 1..=k {
        let a_j = table.a(j)? as f64;
        let t_j = (a_j * growth.powi(-(j as i32))).sqrt() / s;
        sigma2 += t_j * t_j;
        weights.push(t_j);
    }
    let a_stab = table.a_stab()? as f64;
    let x = growth.recip();
    let tail = a_stab * x.powi(k as i32 + 1) / (s * s * (1.0 - x));
    Ok(LimitLaw {
        r,
        ell,
        c,
        k,
        weights,
        sigma2,
        mu: -sigma2 / 2.0,
        tail,
        a_values: table.values.clone(),
        k_stab: table.k_stab,
    })
}

impl LimitLaw {
    /// The combined statistic sum_j t_j Y_j.
    pub fn combine(&self, ys: &[f64]) -> f64 {
        debug_assert_eq!(ys.len(), self.weights.len());
        self.weights.iter().zip(ys).map(|(t, y)| t * y).sum()
    }

    /// Reference mean of exp(-sum t_j Y_j) under the planted model in the
    /// large-n limit: exp(-sigma2 / 2), by the shifted-mean Gaussian MGF.
    pub fn planted_mgf_reference(&self) -> f64 {
        (-self.sigma2 / 2.0).exp()
    }
}

/// Poisson(mean) pmf over 0..=j_max.
pub fn poisson_pmf(mean: f64, j_max: usize) -> Vec<f64> {
    (0..=j_max).map(|j| poisson_point(mean, j)).collect()
}

fn poisson_point(mean: f64, j: usize) -> f64 {
    if mean <= 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let lj = j as f64;
    (lj * mean.ln() - mean - statrs::function::gamma::ln_gamma(lj + 1.0)).exp()
}

/// P(Poisson(mean) <= j) through the regularized upper incomplete gamma.
pub fn poisson_cdf(mean: f64, j: usize) -> f64 {
    if mean <= 0.0 {
        return 1.0;
    }
    statrs::function::gamma::gamma_ur(j as f64 + 1.0, mean)
}

/// Pmf over 0..=j_max of the log-normal Poisson mixture: J ~ Poisson(mW)
/// with log W normal of mean -sigma2/2 and variance sigma2 (so E[W] = 1).
///
/// The integral over W is evaluated by Gauss-Hermite quadrature after the
/// substitution w = exp(mu + sqrt(2) sigma x); the order is doubled until
/// every point mass moves by less than `MIXTURE_TOL`.
pub fn mixture_pmf(mean: f64, sigma2: f64, j_max: usize) -> Result<Vec<f64>> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::InvalidParams(format!("mixture mean {mean} must be positive")));
    }
    if sigma2 < 0.0 || !sigma2.is_finite() {
        return Err(Error::InvalidParams(format!("sigma2 {sigma2} must be nonnegative")));
    }
    if sigma2 < 1e-12 {
        return Ok(poisson_pmf(mean, j_max));
    }
    let mu = -sigma2 / 2.0;
    let sigma = sigma2.sqrt();
    let eval = |order: usize| -> Vec<f64> {
        let (xs, ws) = gauss_hermite(order);
        let inv_sqrt_pi = std::f64::consts::PI.sqrt().recip();
        let mut pmf = vec![0.0; j_max + 1];
        for (&x, &w) in xs.iter().zip(&ws) {
            let lam = mean * (mu + std::f64::consts::SQRT_2 * sigma * x).exp();
            for (j, slot) in pmf.iter_mut().enumerate() {
                *slot += w * inv_sqrt_pi * poisson_point(lam, j);
            }
        }
        pmf
    };
    const MIXTURE_TOL: f64 = 1e-8;
    let mut order = 20;
    let mut prev = eval(order);
    while order < 640 {
        order *= 2;
        let cur = eval(order);
        let diff = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if diff <= MIXTURE_TOL {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numeric("mixture quadrature did not converge by order 640".into()))
}

/// Cdf of the same mixture over 0..=j_max (cumulative sums of the pmf).
pub fn mixture_cdf(mean: f64, sigma2: f64, j_max: usize) -> Result<Vec<f64>> {
    let pmf = mixture_pmf(mean, sigma2, j_max)?;
    let mut acc = 0.0;
    Ok(pmf
        .into_iter()
        .map(|x| {
            acc += x;
            acc.min(1.0)
        })
        .collect())
}

/// Variance-to-mean ratio of the mixture: 1 + mean (e^{sigma2} - 1).
pub fn mixture_dispersion(mean: f64, sigma2: f64) -> f64 {
    1.0 + mean * (sigma2.exp_m1())
}

/// Gauss-Hermite nodes and weights for integrals against e^{-x^2}.
///
/// Newton iteration on the recurrence for orthonormal Hermite polynomials,
/// with the usual asymptotic initial guesses, symmetric roots filled by
/// reflection.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2);
    let n = order;
    let mut xs = vec![0.0f64; n];
    let mut ws = vec![0.0f64; n];
    let mut z = 0.0f64;
    for i in 0..(n + 1) / 2 {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * xs[0],
            3 => 1.91 * z - 0.91 * xs[1],
            _ => 2.0 * z - xs[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0f64;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = z;
        xs[n - 1 - i] = -z;
        ws[i] = 2.0 / (pp * pp);
        ws[n - 1 - i] = ws[i];
    }
    // Roots were generated in descending order of magnitude on one side.
    (xs, ws)
}
