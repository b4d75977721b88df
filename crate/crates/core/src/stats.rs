//! Small statistical toolkit for the experiment harness: KS distances,
//! dispersion and total-variation summaries, bootstrap standard errors,
//! and the pass/fail report records the runners emit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{tag, Seed, SeqStream};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
/// Samples are copied and sorted; NaNs are rejected.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParams("KS needs at least one sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Numeric("KS input contains NaN".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov statistic.
///
/// The supremum gap is tracked as the integer |i nb - j na| and divided
/// once at the end. Taking differences of the rounded step heights instead
/// can land a hair above a gate that the exact statistic sits exactly on.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParams("KS needs nonempty samples on both sides".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xs.len() as u64, ys.len() as u64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut gap = 0u64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        gap = gap.max((i as u64 * nb).abs_diff(j as u64 * na));
    }
    Ok(gap as f64 / (na as f64 * nb as f64))
}

/// Asymptotic KS p-value: P(sup |B(t)| > lambda) with lambda = sqrt(n_eff) d,
/// by the alternating exponential series.
pub fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let lambda = n_eff.sqrt() * d;
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut p = 0.0f64;
    for k in 1..=100 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::InvalidParams("variance needs at least two samples".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok((mean, ss / (n - 1.0)))
}

/// Variance-to-mean ratio of count data.
pub fn dispersion_index(counts: &[u64]) -> Result<f64> {
    let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean, var) = mean_var(&xs)?;
    if mean <= 0.0 {
        return Err(Error::InvalidParams("dispersion needs a positive mean count".into()));
    }
    Ok(var / mean)
}

/// Empirical pmf of counts over 0..=j_max. Counts above j_max overflow the
/// window and are rejected so that TV comparisons stay exact.
pub fn empirical_pmf(counts: &[u64], j_max: usize) -> Result<Vec<f64>> {
    if counts.is_empty() {
        return Err(Error::InvalidParams("empirical pmf needs samples".into()));
    }
    let mut pmf = vec![0.0f64; j_max + 1];
    for &c in counts {
        let idx = usize::try_from(c).map_err(|_| Error::Numeric("count exceeds usize".into()))?;
        if idx > j_max {
            return Err(Error::InvalidParams(format!(
                "observed count {idx} exceeds the comparison window {j_max}"
            )));
        }
        pmf[idx] += 1.0;
    }
    let n = counts.len() as f64;
    for x in &mut pmf {
        *x /= n;
    }
    Ok(pmf)
}

/// Total variation distance between two pmfs given on the same window,
/// charging each side's missing mass beyond the window in full. Exact when
/// at most one of the two has mass outside the window (our usage: the
/// empirical side always sums to 1 inside it).
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidParams("TV inputs must share a window".into()));
    }
    let core: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    let p_rest = (1.0 - p.iter().sum::<f64>()).max(0.0);
    let q_rest = (1.0 - q.iter().sum::<f64>()).max(0.0);
    Ok(0.5 * (core + p_rest + q_rest))
}

/// Sample-size bound for telling the planted and null models apart by the
/// count alone: with E[Z] held at m/log n scaling, the squared-Hellinger
/// proxy z' (m / log n)^2 controls the error of any test.
pub fn le_cam_bound(z_prime: f64, target_m: f64, log_n: f64) -> f64 {
    z_prime * (target_m / log_n).powi(2)
}

/// Bootstrap standard error of the sample mean. Resampling is driven by
/// the deterministic stream under the bootstrap tag so reports replay.
pub fn bootstrap_mean_std(xs: &[f64], reps: usize, seed: Seed) -> Result<(f64, f64)> {
    if xs.len() < 2 || reps < 2 {
        return Err(Error::InvalidParams("bootstrap needs >= 2 samples and >= 2 reps".into()));
    }
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let mut stream = SeqStream::new(seed, tag::BOOT);
    let mut means = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut acc = 0.0;
        for _ in 0..n {
            acc += xs[stream.next_below(n as u64) as usize];
        }
        means.push(acc / n as f64);
    }
    let (_, var) = mean_var(&means)?;
    Ok((mean, var.sqrt()))
}

/// One named pass/fail line: a value checked against a closed interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateReport {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl GateReport {
    pub fn band(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        GateReport {
            name: name.to_string(),
            value,
            lo,
            hi,
            pass: value.is_finite() && lo <= value && value <= hi,
        }
    }

    /// Upper bound only.
    pub fn at_most(name: &str, value: f64, hi: f64) -> Self {
        Self::band(name, value, f64::NEG_INFINITY, hi)
    }

    pub fn line(&self) -> String {
        format!(
            "{}: {} value={:.6} window=[{}, {}]",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.value,
            self.lo,
            self.hi
        )
    }
}
