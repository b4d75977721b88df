//! Independent verification routines. Everything here recomputes a
//! quantity by a second route (full enumeration, exact rational identity,
//! or Monte Carlo with error bars) and compares against the closed forms
//! in `theory`. The experiment harness exposes these as subcommands so a
//! skeptical user can re-derive the constants on their own machine.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::aut::cycle_copies;
use crate::count::{count_hamilton, count_path_copies, enumerate_hamilton, CountMethod};
use crate::error::{Error, Result};
use crate::graph::Hypergraph;
use crate::models::{plant_cycle, sample_gnp};
use crate::params::Params;
use crate::pattern::CycleCopy;
use crate::rng::Seed;
use crate::stats::{bootstrap_mean_std, GateReport};
use crate::theory::{expected_z, limit_law, planted_y_mean, plugin_scale, LimitLaw};
use crate::ystat::{x_statistic, y_vector};

/// Largest copy family the pairwise scan will enumerate, 25 million mask
/// intersections at the cap.
pub const OVERLAP_COPY_CAP: u64 = 5_000;

/// Joint edge-overlap distribution of an ordered pair of uniform random
/// Hamilton l-cycle copies on the complete r-graph, counted exactly.
#[derive(Debug, Clone, Serialize)]
pub struct OverlapTable {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub m: usize,
    /// N_C, checked against n! / |Aut(C)|.
    pub copies: u64,
    /// pair_counts[t] = ordered copy pairs sharing exactly t edges; the
    /// diagonal contributes all of pair_counts[m].
    pub pair_counts: Vec<u128>,
    /// Overlap histogram of every copy against one fixed copy.
    pub row_counts: Vec<u64>,
}

/// Enumerate all copies and intersect their edge sets pairwise.
pub fn overlap_table(n: usize, r: usize, ell: usize) -> Result<OverlapTable> {
    let params = Params::new(n, r, ell, 0.5)?;
    let m = params.m_edges();
    let closed = cycle_copies(n, r, ell)?;
    let copies_u64 = closed
        .to_u64()
        .filter(|&c| c <= OVERLAP_COPY_CAP)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "copy family of size {closed} exceeds the pairwise scan cap {OVERLAP_COPY_CAP}"
            ))
        })?;
    let complete = Hypergraph::complete(n, r)?;
    let copies = enumerate_hamilton(&complete, ell, copies_u64 as usize + 1)?;
    if copies.len() as u64 != copies_u64 {
        return Err(Error::ClosedFormMismatch {
            n,
            brute: copies.len().to_string(),
            closed: closed.to_string(),
        });
    }
    // Pack each copy's m edge ranks into a bitset over all C(n,r) ranks.
    let words = (complete.edge_count() + 63) / 64;
    let masks: Vec<Vec<u64>> = copies
        .iter()
        .map(|ranks| {
            let mut w = vec![0u64; words];
            for &rk in ranks {
                w[(rk / 64) as usize] |= 1u64 << (rk % 64);
            }
            w
        })
        .collect();
    let inter = |a: &[u64], b: &[u64]| -> usize {
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
    };
    let mut pair_counts = vec![0u128; m + 1];
    for i in 0..masks.len() {
        pair_counts[m] += 1; // the diagonal pair (i, i)
        for j in (i + 1)..masks.len() {
            let t = inter(&masks[i], &masks[j]);
            pair_counts[t] += 2;
        }
    }
    let row_counts: Vec<u64> = {
        let mut row = vec![0u64; m + 1];
        for mk in &masks {
            row[inter(&masks[0], mk)] += 1;
        }
        row
    };
    Ok(OverlapTable { n, r, ell, m, copies: copies_u64, pair_counts, row_counts })
}

impl OverlapTable {
    /// Marginal sanity: pair counts sum to N^2, the row to N, and only
    /// the copy itself shares all m edges (edge sets identify copies).
    pub fn check_consistency(&self) -> Result<()> {
        let n2 = (self.copies as u128) * (self.copies as u128);
        let total: u128 = self.pair_counts.iter().sum();
        if total != n2 {
            return Err(Error::Numeric(format!("pair counts sum to {total}, want {n2}")));
        }
        let row_total: u64 = self.row_counts.iter().sum();
        if row_total != self.copies {
            return Err(Error::Numeric(format!("row counts sum to {row_total}, want {}", self.copies)));
        }
        if self.pair_counts[self.m] != self.copies as u128 || self.row_counts[self.m] != 1 {
            return Err(Error::Numeric("a distinct pair of copies shares every edge".into()));
        }
        Ok(())
    }

}

#[derive(Debug, Clone, Serialize)]
pub struct SecondMomentReport {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub p: f64,
    pub expected_z: f64,
    pub second_moment: f64,
    /// E[Z^2] / E[Z]^2, the quantity whose boundedness drives weak
    /// concentration at threshold scale.
    pub ratio: f64,
    /// Exact decimal form num/den of the second moment, for reports.
    pub second_moment_exact: String,
    /// Agreement of all three exact routes, bit for bit.
    pub routes_equal: bool,
    /// Float image of the largest pairwise route difference; identically
    /// 0 when `routes_equal`, reported for the record.
    pub route_residual: f64,
}

/// Compute E[Z^2] three ways, all in exact rationals:
///   (a) sum_t pair_t p^{2m-t} over the enumerated pair table,
///   (b) E[Z]^2 sum_t P(t) p^{-t} with P(t) = pair_t / N_C^2 and the
///       closed-form E[Z] = (n!/|Aut|) p^m,
///   (c) E[Z] * sum_t row_t p^{m-t}, one fixed copy's overlap histogram
///       lifted by vertex transitivity.
/// The three must agree exactly; (b) and (c) pull N_C from the closed
/// form rather than the enumeration, so agreement also re-verifies it.
pub fn second_moment_check(n: usize, r: usize, ell: usize, p: f64) -> Result<SecondMomentReport> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidParams("second moment check needs 0 < p < 1".into()));
    }
    let table = overlap_table(n, r, ell)?;
    table.check_consistency()?;
    let p_rat = BigRational::from_float(p)
        .ok_or_else(|| Error::InvalidParams("p is not finite".into()))?;
    // Power table p^0 .. p^{2m}.
    let mut pows = Vec::with_capacity(2 * table.m + 1);
    pows.push(BigRational::one());
    for i in 1..=2 * table.m {
        let prev = pows[i - 1].clone();
        pows.push(prev * &p_rat);
    }
    let mut route_pairs = BigRational::zero();
    for (t, &cnt) in table.pair_counts.iter().enumerate() {
        if cnt != 0 {
            route_pairs += BigRational::from_integer(BigUint::from(cnt).into()) * &pows[2 * table.m - t];
        }
    }
    let (ez_exact, ez) = expected_z(n, r, ell, p)?;
    let n2 = BigRational::from_integer(
        (BigUint::from(table.copies) * BigUint::from(table.copies)).into(),
    );
    let mut overlap_factor = BigRational::zero();
    for (t, &cnt) in table.pair_counts.iter().enumerate() {
        if cnt != 0 {
            // P(t) / p^t.
            overlap_factor +=
                BigRational::from_integer(BigUint::from(cnt).into()) / (&n2 * &pows[t]);
        }
    }
    let route_distribution = &ez_exact * &ez_exact * overlap_factor;
    let mut row_sum = BigRational::zero();
    for (t, &cnt) in table.row_counts.iter().enumerate() {
        if cnt != 0 {
            row_sum += BigRational::from_integer(cnt.into()) * &pows[table.m - t];
        }
    }
    let route_row = &ez_exact * row_sum;
    let routes_equal = route_pairs == route_distribution && route_pairs == route_row;
    let residual = (route_pairs.clone() - route_distribution)
        .to_f64()
        .unwrap_or(f64::NAN)
        .abs()
        .max((route_pairs.clone() - route_row).to_f64().unwrap_or(f64::NAN).abs());
    let second_moment = route_pairs
        .to_f64()
        .ok_or_else(|| Error::Numeric("second moment does not fit in f64".into()))?;
    Ok(SecondMomentReport {
        n,
        r,
        ell,
        p,
        expected_z: ez,
        second_moment,
        ratio: second_moment / (ez * ez),
        second_moment_exact: format!("{}/{}", route_pairs.numer(), route_pairs.denom()),
        routes_equal,
        route_residual: residual,
    })
}

/// Monte Carlo means of Y_1..Y_k under the planted model, gated against
/// the exact finite-n formula at 4 bootstrap sigmas and, when the limit
/// law applies at the implied scale, against the asymptotic weights at
/// `rel_band` relative error.
pub fn planted_mean_report(
    params: &Params,
    k_max: usize,
    trials: usize,
    seed_root: u64,
    rel_band: f64,
) -> Result<Vec<GateReport>> {
    if trials < 8 {
        return Err(Error::InvalidParams("planted mean check needs >= 8 trials".into()));
    }
    let mut samples = vec![Vec::with_capacity(trials); k_max];
    for trial in 0..trials {
        let inst = plant_cycle(params, Seed::new(seed_root, trial as u64))?;
        let ys = y_vector(&inst.graph, params.ell, k_max, params.p)?;
        for (k, &y) in ys.iter().enumerate() {
            samples[k].push(y);
        }
    }
    let law: Option<LimitLaw> = plugin_scale(params.n, params.r, params.ell, params.p)
        .and_then(|c| limit_law(params.r, params.ell, c, k_max))
        .ok();
    let mut gates = Vec::new();
    for k in 1..=k_max {
        let (mean, sig) = bootstrap_mean_std(&samples[k - 1], 400, Seed::new(seed_root, (1 << 40) + k as u64))?;
        let exact = planted_y_mean(params.n, params.r, params.ell, params.p, k)?;
        let sig = sig.max(1e-12);
        gates.push(GateReport::band(
            &format!("planted_mean_sigmas_k{k}"),
            (mean - exact) / sig,
            -4.0,
            4.0,
        ));
        if let Some(law) = &law {
            let t_k = law.weights[k - 1];
            gates.push(GateReport::band(
                &format!("planted_mean_vs_limit_k{k}"),
                mean / t_k,
                1.0 - rel_band,
                1.0 + rel_band,
            ));
        }
    }
    Ok(gates)
}

/// Two-sided Monte Carlo check of the conditioned-count identity
/// E[X] = E*[exp(-Y_N)]: the left expectation over the null model with Z
/// counted exactly, the right over the planted model. Exact in
/// expectation at every n, so the two estimates must sit within
/// overlapping 4 sigma bootstrap bands; both are also compared against
/// the limit value exp(-sigma_K^2/2) at `rel_band` relative error.
#[derive(Debug, Clone, Serialize)]
pub struct MgfReport {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub c: f64,
    pub p: f64,
    pub k: usize,
    pub trials: usize,
    pub seed_root: u64,
    pub reference: f64,
    pub planted_mean: f64,
    pub planted_sigma: f64,
    pub null_x_mean: f64,
    pub null_x_sigma: f64,
    pub gates: Vec<GateReport>,
}

pub fn planted_mgf_report(
    n: usize,
    r: usize,
    ell: usize,
    c: f64,
    k: usize,
    trials: usize,
    seed_root: u64,
    rel_band: f64,
) -> Result<MgfReport> {
    if trials < 8 {
        return Err(Error::InvalidParams("planted MGF check needs >= 8 trials".into()));
    }
    let law = limit_law(r, ell, c, k)?;
    let p = crate::theory::p_star(n, r, ell, c)?;
    let params = Params::new(n, r, ell, p)?;
    let (_, ez) = expected_z(n, r, ell, p)?;
    let mut planted = Vec::with_capacity(trials);
    for trial in 0..trials {
        let inst = plant_cycle(&params, Seed::new(seed_root, trial as u64))?;
        let ys = y_vector(&inst.graph, ell, k, p)?;
        planted.push((-law.combine(&ys)).exp());
    }
    // Null side on a disjoint seed stream, with the count taken exactly.
    let mut null_x = Vec::with_capacity(trials);
    for trial in 0..trials {
        let seed = Seed::new(seed_root, (1 << 32) + trial as u64);
        let g = sample_gnp(&params, seed)?;
        let ys = y_vector(&g, ell, k, p)?;
        let z = count_hamilton(&g, ell, CountMethod::Auto)?.count;
        null_x.push(x_statistic(&z, ez, law.combine(&ys))?);
    }
    let (p_mean, p_sig) = bootstrap_mean_std(&planted, 400, Seed::new(seed_root, 1 << 41))?;
    let (x_mean, x_sig) = bootstrap_mean_std(&null_x, 400, Seed::new(seed_root, (1 << 41) + 1))?;
    let p_sig = p_sig.max(1e-12);
    let x_sig = x_sig.max(1e-12);
    let reference = law.planted_mgf_reference();
    let gates = vec![
        GateReport::band(
            "mgf_identity_overlap",
            (p_mean - x_mean) / (p_sig + x_sig),
            -4.0,
            4.0,
        ),
        GateReport::band("planted_mgf_sigmas", (p_mean - reference) / p_sig, -4.0, 4.0),
        GateReport::band(
            "planted_mgf_vs_limit",
            p_mean / reference,
            1.0 - rel_band,
            1.0 + rel_band,
        ),
        GateReport::band(
            "null_x_vs_limit",
            x_mean / reference,
            1.0 - rel_band,
            1.0 + rel_band,
        ),
    ];
    Ok(MgfReport {
        n,
        r,
        ell,
        c,
        p,
        k,
        trials,
        seed_root,
        reference,
        planted_mean: p_mean,
        planted_sigma: p_sig,
        null_x_mean: x_mean,
        null_x_sigma: x_sig,
        gates,
    })
}

/// Sampled-graph scan for large pairwise overlaps: at the density where
/// E[Z] = log n, enumerate every Hamilton cycle of each sample and look
/// for ordered pairs sharing t in [ceil(log n), m-1] edges. Such pairs
/// are rare at threshold scale, and t = m-1 is structurally impossible
/// when s = 1.
#[derive(Debug, Clone, Serialize)]
pub struct BigOverlapReport {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub p: f64,
    pub trials: usize,
    pub seed_root: u64,
    pub threshold_t: usize,
    /// Trials containing at least one qualifying ordered pair.
    pub trials_with_big_pair: usize,
    pub frequency: f64,
    pub pairs_at_m_minus_1: u64,
    pub max_offdiagonal_overlap: usize,
    pub gates: Vec<GateReport>,
}

pub fn big_overlap_scan(
    n: usize,
    r: usize,
    ell: usize,
    trials: usize,
    seed_root: u64,
) -> Result<BigOverlapReport> {
    if trials == 0 {
        return Err(Error::InvalidParams("big overlap scan needs trials >= 1".into()));
    }
    let log_n = (n as f64).ln();
    let p = crate::theory::p_for_expectation(n, r, ell, log_n)?;
    let params = Params::new(n, r, ell, p)?;
    let m = params.m_edges();
    let threshold_t = (log_n.ceil() as usize).max(1);
    let mut trials_with_big_pair = 0usize;
    let mut pairs_at_m_minus_1 = 0u64;
    let mut max_off = 0usize;
    for trial in 0..trials {
        let g = sample_gnp(&params, Seed::new(seed_root, trial as u64))?;
        let copies = enumerate_hamilton(&g, ell, 100_000)?;
        let sets: Vec<std::collections::HashSet<u64>> = copies
            .iter()
            .map(|ranks| ranks.iter().copied().collect())
            .collect();
        let mut hit = false;
        for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                let t = sets[i].intersection(&sets[j]).count();
                max_off = max_off.max(t);
                if t >= threshold_t && t <= m - 1 {
                    hit = true;
                }
                if t == m - 1 {
                    pairs_at_m_minus_1 += 2;
                }
            }
        }
        if hit {
            trials_with_big_pair += 1;
        }
    }
    let frequency = trials_with_big_pair as f64 / trials as f64;
    let mut gates = vec![GateReport::at_most("big_overlap_frequency", frequency, 0.5)];
    if params.shape().step == 1 {
        gates.push(GateReport::band(
            "overlap_m_minus_1_pairs",
            pairs_at_m_minus_1 as f64,
            0.0,
            0.0,
        ));
    }
    Ok(BigOverlapReport {
        n,
        r,
        ell,
        p,
        trials,
        seed_root,
        threshold_t,
        trials_with_big_pair,
        frequency,
        pairs_at_m_minus_1,
        max_offdiagonal_overlap: max_off,
        gates,
    })
}

/// Exhaustive finite-n confirmation of the planted-mean closed form: the
/// only k-edge paths with every window planted are the m runs of
/// consecutive cycle windows, so the analytic expectation is exactly
/// m (1-p)^k / sqrt(N_k (p(1-p))^k).
pub fn planted_mean_exhaustive(n: usize, r: usize, ell: usize, p: f64, k: usize) -> Result<f64> {
    let params = Params::new(n, r, ell, p)?;
    let cycle = CycleCopy::canonical(n, r, ell)?;
    let cycle_graph = Hypergraph::from_ranks(n, r, cycle.sorted_ranks())?;
    let inside = count_path_copies(&cycle_graph, ell, k)?
        .to_f64()
        .ok_or_else(|| Error::Numeric("path count exceeds f64".into()))?;
    let n_k = crate::aut::path_copies_f64(n, r, ell, k)?;
    let m = params.m_edges() as f64;
    if (inside - m).abs() > 0.0 {
        return Err(Error::Numeric(format!(
            "expected exactly m={m} planted path copies, found {inside}"
        )));
    }
    let q = 1.0 - p;
    Ok(inside * q.powi(k as i32) / (n_k * (p * q).powi(k as i32)).sqrt())
}
