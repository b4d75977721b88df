//! Experiment runners: trial loops, aggregation, gates, and the output
//! contract.
//!
//! Every runner follows the same shape. Trials are pure functions of
//! (config, root seed, trial index), executed on a rayon pool and collected
//! in trial order, so worker count and scheduling never change a single
//! logged value. Aggregation happens once, from the collected rows, which
//! is also what makes every summary statistic recomputable from the CSV.
//!
//! Gates come in two layers: each experiment installs the windows its
//! claims are about (means, dispersion, KS distances), and the config may
//! append extra windows over any reported metric. The run passes iff every
//! gate passes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use hamlaw_core::count::{count_hamilton, CountMethod};
use hamlaw_core::models::{plant_cycle, plant_two_cycles, sample_gnp, thin};
use hamlaw_core::oracle;
use hamlaw_core::rng::Seed;
use hamlaw_core::stats::{self, GateReport};
use hamlaw_core::theory;
use hamlaw_core::ystat::{x_statistic, y_vector};
use hamlaw_core::{Error, Result};

use crate::config::{ExperimentConfig, ExperimentKind, ModelKind, Resolved};

/// Stream offsets keeping independent sampling lanes apart. Direct trials
/// use the trial index itself; the two-stage pipeline and the bootstrap
/// lanes sit far above any realistic trial count.
const STAGE1_STREAM: u64 = 1 << 33;
const BOOT_STREAM: u64 = 1 << 40;
/// Bootstrap resamples behind every Monte Carlo sigma estimate.
const BOOT_REPS: usize = 400;
/// Histogram comparisons extend the window until the reference law has at
/// most this much mass beyond it.
const PMF_TAIL_EPS: f64 = 1e-9;

/// One trial's observables. Everything here is a pure function of the
/// config, the root seed, and the trial index. Wall time is deliberately
/// not recorded per trial: it would break the byte-identical replay
/// contract, so the CSV's elapsed_ms column carries a fixed 0 and total
/// timing lives in the summary.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub trial: u64,
    pub seed_key: u64,
    pub edge_count: u64,
    pub z: Option<BigUint>,
    pub ys: Vec<f64>,
    pub y_n: Option<f64>,
    pub x: Option<f64>,
}

pub fn csv_header(k: usize) -> String {
    let mut h = String::from("trial,seed,edge_count,Z");
    for j in 1..=k {
        h.push_str(&format!(",Y_{j}"));
    }
    h.push_str(",Y_N,X,elapsed_ms");
    h
}

impl TrialRow {
    /// Serialize into the fixed column order. Floats use the shortest
    /// round-trip representation, so parsing the CSV recovers the exact
    /// bits that produced the summary.
    pub fn csv_line(&self, k: usize) -> String {
        let mut line = format!("{},{},{},", self.trial, self.seed_key, self.edge_count);
        if let Some(z) = &self.z {
            line.push_str(&z.to_string());
        }
        for j in 0..k {
            line.push(',');
            if let Some(y) = self.ys.get(j) {
                line.push_str(&y.to_string());
            }
        }
        line.push(',');
        if let Some(y) = self.y_n {
            line.push_str(&y.to_string());
        }
        line.push(',');
        if let Some(x) = self.x {
            line.push_str(&x.to_string());
        }
        line.push_str(",0");
        line
    }
}

/// A finished run: rows, derived statistics, references the statistics are
/// judged against, and the gate verdicts.
#[derive(Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub rows: Vec<TrialRow>,
    /// Second pipeline of the poisson two-stage comparison; empty otherwise.
    pub thinned_rows: Vec<TrialRow>,
    pub metrics: BTreeMap<String, f64>,
    pub references: BTreeMap<String, f64>,
    pub gates: Vec<GateReport>,
    pub pass: bool,
    /// Extra payload from the oracle suite (exact values as strings).
    pub oracle_detail: Option<serde_json::Value>,
    pub elapsed_ms: u128,
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let resolved = config.resolve()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolved.workers)
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;

    let mut result = match config.experiment {
        ExperimentKind::Concentration => run_concentration(config, &resolved, &pool)?,
        ExperimentKind::Lognormal => run_lognormal(config, &resolved, &pool)?,
        ExperimentKind::Poisson => run_poisson(config, &resolved, &pool)?,
        ExperimentKind::Clt => run_clt(config, &resolved, &pool)?,
        ExperimentKind::OracleSuite => run_oracle_suite(config, &resolved)?,
    };

    for spec in &config.gates {
        let value = result.metrics.get(&spec.name).copied().ok_or_else(|| {
            Error::InvalidParams(format!(
                "gate '{}' names no metric of the {} experiment",
                spec.name,
                config.experiment.name()
            ))
        })?;
        result.gates.push(GateReport::band(&spec.name, value, spec.lo, spec.hi));
    }
    result.pass = result.gates.iter().all(|g| g.pass);
    result.elapsed_ms = start.elapsed().as_millis();
    Ok(result)
}

fn par_rows<F>(pool: &rayon::ThreadPool, trials: usize, f: F) -> Result<Vec<TrialRow>>
where
    F: Fn(u64) -> Result<TrialRow> + Sync,
{
    pool.install(|| (0..trials as u64).into_par_iter().map(&f).collect())
}

fn ratio_series(rows: &[TrialRow], e_z: f64) -> Result<Vec<f64>> {
    rows.iter()
        .map(|row| {
            let z = row.z.as_ref().ok_or_else(|| Error::Numeric("missing count".into()))?;
            let zf = z.to_f64().ok_or_else(|| Error::Numeric("count exceeds f64 range".into()))?;
            Ok(zf / e_z)
        })
        .collect()
}

fn count_series(rows: &[TrialRow]) -> Result<Vec<u64>> {
    rows.iter()
        .map(|row| {
            row.z
                .as_ref()
                .and_then(|z| z.to_u64())
                .ok_or_else(|| Error::Numeric("count exceeds the histogram range".into()))
        })
        .collect()
}

fn skeleton(config: &ExperimentConfig, resolved: &Resolved) -> ExperimentResult {
    ExperimentResult {
        config: config.clone(),
        resolved: resolved.clone(),
        rows: vec![],
        thinned_rows: vec![],
        metrics: BTreeMap::new(),
        references: BTreeMap::new(),
        gates: vec![],
        pass: false,
        oracle_detail: None,
        elapsed_ms: 0,
    }
}

/// ell >= 3: the count concentrates, so the whole story is the ratio
/// Z / E[Z] and its second moment. The reference exp(sum (m w_j)^2) is the
/// finite-n value of the second-moment ratio bound; at these sizes it is
/// usually far from 1 even though it tends to 1 in n, so the cv2 window is
/// reported against both.
fn run_concentration(
    config: &ExperimentConfig,
    resolved: &Resolved,
    pool: &rayon::ThreadPool,
) -> Result<ExperimentResult> {
    let params = resolved.params;
    let root = config.seed;
    let rows = par_rows(pool, config.trials, |i| {
        let seed = Seed::new(root, i);
        let g = sample_gnp(&params, seed)?;
        let out = count_hamilton(&g, params.ell, CountMethod::Auto)?;
        Ok(TrialRow {
            trial: i,
            seed_key: seed.key(),
            edge_count: g.edge_count() as u64,
            z: Some(out.count),
            ys: vec![],
            y_n: None,
            x: None,
        })
    })?;

    let ratios = ratio_series(&rows, resolved.e_z)?;
    let (mean_ratio, var_ratio) = stats::mean_var(&ratios)?;
    let cv2 = var_ratio / (mean_ratio * mean_ratio);
    // A saturated density has no edge fluctuations left to correct for.
    let sigma_f2 = if params.p >= 1.0 {
        0.0
    } else {
        theory::finite_size_sigma2(config.n, config.r, config.ell, params.p, resolved.k)?
    };
    let cv2_bound = 1.0 / resolved.e_z + 0.1;

    let mut out = skeleton(config, resolved);
    out.rows = rows;
    out.metrics.insert("mean_ratio".into(), mean_ratio);
    out.metrics.insert("cv2".into(), cv2);
    out.references.insert("e_z".into(), resolved.e_z);
    out.references.insert("p".into(), params.p);
    out.references.insert("c_n".into(), resolved.c_n);
    out.references.insert("cv2_bound".into(), cv2_bound);
    out.references.insert("finite_size_sigma2".into(), sigma_f2);
    out.references.insert("second_moment_ratio".into(), sigma_f2.exp());
    out.gates.push(GateReport::band("mean_ratio", mean_ratio, 0.9, 1.1));
    out.gates.push(GateReport::at_most("cv2", cv2, cv2_bound));
    Ok(out)
}

/// ell = 2: log(Z / E[Z]) against the truncated normal law at the plug-in
/// scale c_n, and the corrected statistic X = (Z / E[Z]) e^{-Y_N} against
/// its constant limit. Trials with Z = 0 enter the KS statistic as -inf,
/// where the reference normal puts mass zero, so they count against the
/// fit rather than being dropped.
fn run_lognormal(
    config: &ExperimentConfig,
    resolved: &Resolved,
    pool: &rayon::ThreadPool,
) -> Result<ExperimentResult> {
    let params = resolved.params;
    let law = resolved.law.clone().expect("validated in resolve");
    let root = config.seed;
    let e_z = resolved.e_z;
    let k = resolved.k;
    let rows = par_rows(pool, config.trials, |i| {
        let seed = Seed::new(root, i);
        let g = sample_gnp(&params, seed)?;
        let ys = y_vector(&g, params.ell, k, params.p)?;
        let y_n = law.combine(&ys);
        let out = count_hamilton(&g, params.ell, CountMethod::Auto)?;
        let x = x_statistic(&out.count, e_z, y_n)?;
        Ok(TrialRow {
            trial: i,
            seed_key: seed.key(),
            edge_count: g.edge_count() as u64,
            z: Some(out.count),
            ys,
            y_n: Some(y_n),
            x: Some(x),
        })
    })?;

    let ratios = ratio_series(&rows, e_z)?;
    let log_ratios: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let sigma = law.sigma2.sqrt();
    let ks = stats::ks_one_sample(&log_ratios, |t| stats::normal_cdf((t - law.mu) / sigma))?;
    let ks_p = stats::ks_p_value(ks, config.trials as f64);

    let (mean_ratio, var_ratio) = stats::mean_var(&ratios)?;
    let ratio_cv = var_ratio.sqrt() / mean_ratio;
    let (_, boot_sigma) =
        stats::bootstrap_mean_std(&ratios, BOOT_REPS, Seed::new(root, BOOT_STREAM))?;
    let mean_ratio_sigmas = (mean_ratio - 1.0) / boot_sigma;

    let xs: Vec<f64> = rows.iter().map(|r| r.x.expect("set above")).collect();
    let (x_mean, x_var) = stats::mean_var(&xs)?;
    let x_cv = x_var.sqrt() / x_mean;
    let x_limit = law.planted_mgf_reference();

    let mut out = skeleton(config, resolved);
    out.rows = rows;
    out.metrics.insert("ks_log_ratio".into(), ks);
    out.metrics.insert("ks_p".into(), ks_p);
    out.metrics.insert("mean_ratio".into(), mean_ratio);
    out.metrics.insert("mean_ratio_sigmas".into(), mean_ratio_sigmas);
    out.metrics.insert("ratio_cv".into(), ratio_cv);
    out.metrics.insert("x_mean".into(), x_mean);
    out.metrics.insert("x_cv".into(), x_cv);
    out.metrics.insert("x_over_limit".into(), x_mean / x_limit);
    out.metrics.insert("x_m2_ratio".into(), 1.0 + x_cv * x_cv);
    out.metrics
        .insert("x_spread_smaller".into(), if x_cv < ratio_cv { 1.0 } else { 0.0 });
    out.references.insert("e_z".into(), e_z);
    out.references.insert("p".into(), params.p);
    out.references.insert("c_n".into(), resolved.c_n);
    out.references.insert("mu".into(), law.mu);
    out.references.insert("sigma2".into(), law.sigma2);
    out.references.insert("tail".into(), law.tail);
    out.references.insert("x_limit".into(), x_limit);
    out.references.insert("x_m2_pred".into(), law.tail.exp());
    out.gates.push(GateReport::at_most("ks_log_ratio", ks, 0.1));
    out.gates.push(GateReport::band("mean_ratio_sigmas", mean_ratio_sigmas, -4.0, 4.0));
    Ok(out)
}

/// Smallest window covering both the observations and all but PMF_TAIL_EPS
/// of the reference law's mass, so the TV comparison is exact up to that
/// epsilon.
fn histogram_window<C: Fn(usize) -> f64>(max_obs: u64, cdf_at: C) -> usize {
    let mut j_max = (max_obs as usize).max(8);
    while 1.0 - cdf_at(j_max) > PMF_TAIL_EPS && j_max < 4096 {
        j_max += 8;
    }
    j_max
}

/// target_m mode: Z against Poisson(m) for ell >= 3 and against the
/// lognormal mixture for ell = 2, plus the optional two-stage pipeline
/// (sample at E[Z] = log n, thin down to the target) whose law must match
/// the direct pipeline exactly.
fn run_poisson(
    config: &ExperimentConfig,
    resolved: &Resolved,
    pool: &rayon::ThreadPool,
) -> Result<ExperimentResult> {
    let params = resolved.params;
    let root = config.seed;
    let target = resolved.target_m.expect("validated in resolve");
    let rows = par_rows(pool, config.trials, |i| {
        let seed = Seed::new(root, i);
        let g = sample_gnp(&params, seed)?;
        let out = count_hamilton(&g, params.ell, CountMethod::Auto)?;
        Ok(TrialRow {
            trial: i,
            seed_key: seed.key(),
            edge_count: g.edge_count() as u64,
            z: Some(out.count),
            ys: vec![],
            y_n: None,
            x: None,
        })
    })?;

    let counts = count_series(&rows)?;
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean_z, _) = stats::mean_var(&as_f64)?;
    let mean_ratio = mean_z / target;
    let dispersion = stats::dispersion_index(&counts)?;
    let max_obs = counts.iter().copied().max().unwrap_or(0);

    let mut out = skeleton(config, resolved);
    out.metrics.insert("mean_z".into(), mean_z);
    out.metrics.insert("mean_ratio".into(), mean_ratio);
    out.metrics.insert("dispersion".into(), dispersion);
    out.references.insert("target_m".into(), target);
    out.references.insert("p".into(), params.p);
    out.references.insert("c_n".into(), resolved.c_n);

    if config.ell >= 3 {
        let j_max = histogram_window(max_obs, |j| theory::poisson_cdf(target, j));
        let emp = stats::empirical_pmf(&counts, j_max)?;
        let pois = theory::poisson_pmf(target, j_max);
        let tv = stats::tv_distance(&emp, &pois)?;
        out.metrics.insert("tv_poisson".into(), tv);
        out.references.insert("dispersion_pred".into(), 1.0);
        // The limit is plain Poisson, but at desk scale the count is still
        // a visibly mixed Poisson; this is what the dispersion would be if
        // the intensity kept its finite-n lognormal spread.
        let sigma_f2 =
            theory::finite_size_sigma2(config.n, config.r, config.ell, params.p, resolved.k)?;
        out.references.insert("finite_size_sigma2".into(), sigma_f2);
        out.references
            .insert("dispersion_finite_n".into(), theory::mixture_dispersion(target, sigma_f2));
        out.gates.push(GateReport::band("mean_ratio", mean_ratio, 0.9, 1.1));
        out.gates.push(GateReport::band("dispersion", dispersion, 0.8, 1.3));
    } else {
        let law = resolved.law.as_ref().expect("validated in resolve");
        // The mixture parameter is the full plug-in variance: the truncated
        // series plus its certified tail bound.
        let sigma2 = law.sigma2 + law.tail;
        let cdf = theory::mixture_cdf(target, sigma2, 4096)?;
        let j_max = histogram_window(max_obs, |j| cdf.get(j).copied().unwrap_or(1.0));
        let emp = stats::empirical_pmf(&counts, j_max)?;
        let mix = theory::mixture_pmf(target, sigma2, j_max)?;
        let tv = stats::tv_distance(&emp, &mix)?;
        out.metrics.insert("tv_mixture".into(), tv);
        out.references.insert("sigma2".into(), sigma2);
        out.references
            .insert("dispersion_pred".into(), theory::mixture_dispersion(target, sigma2));
        out.gates.push(GateReport::band("dispersion", dispersion, 1.5, f64::INFINITY));
        out.gates.push(GateReport::at_most("tv_mixture", tv, 0.2));
    }

    if resolved.two_stage {
        let log_n = (config.n as f64).ln();
        if target > log_n {
            return Err(Error::InvalidParams(format!(
                "two-stage thinning needs target_m <= ln n = {log_n:.3}"
            )));
        }
        let p_first = theory::p_for_expectation(config.n, config.r, config.ell, log_n)?;
        // Thinning a p_first edge set by keep leaves Bernoulli(p_first *
        // keep) edges, so this ratio makes the composed pipeline match the
        // direct density exactly.
        let keep = params.p / p_first;
        let params_first = params.with_p(p_first)?;
        let thinned = par_rows(pool, config.trials, |i| {
            let seed = Seed::new(root, STAGE1_STREAM + i);
            let g_first = sample_gnp(&params_first, seed)?;
            let g = thin(&g_first, keep, seed)?;
            let out = count_hamilton(&g, params.ell, CountMethod::Auto)?;
            Ok(TrialRow {
                trial: i,
                seed_key: seed.key(),
                edge_count: g.edge_count() as u64,
                z: Some(out.count),
                ys: vec![],
                y_n: None,
                x: None,
            })
        })?;
        let direct_edges: Vec<f64> = rows.iter().map(|r| r.edge_count as f64).collect();
        let thinned_edges: Vec<f64> = thinned.iter().map(|r| r.edge_count as f64).collect();
        let ks = stats::ks_two_sample(&direct_edges, &thinned_edges)?;
        out.metrics.insert("ks_pipelines".into(), ks);
        out.references.insert("keep".into(), keep);
        out.references.insert("p_first".into(), p_first);
        out.references.insert("le_cam".into(), stats::le_cam_bound(log_n, target, log_n));
        out.gates.push(GateReport::at_most("ks_pipelines", ks, 0.05));
        out.thinned_rows = thinned;
    }

    out.rows = rows;
    Ok(out)
}

/// Y(P_1)..Y(P_K) under the null, planted, or double-planted measure: per
/// coordinate means and variances, the full covariance matrix, and KS
/// normality diagnostics after centering at the sample mean.
fn run_clt(
    config: &ExperimentConfig,
    resolved: &Resolved,
    pool: &rayon::ThreadPool,
) -> Result<ExperimentResult> {
    let params = resolved.params;
    let root = config.seed;
    let k = resolved.k;
    let model = resolved.model;
    let overlap_t = resolved.overlap_t;
    let rows = par_rows(pool, config.trials, |i| {
        let seed = Seed::new(root, i);
        let g = match model {
            ModelKind::Null => sample_gnp(&params, seed)?,
            ModelKind::Planted => plant_cycle(&params, seed)?.graph,
            ModelKind::PlantedPair => {
                plant_two_cycles(&params, overlap_t.expect("validated"), seed)?.graph
            }
        };
        let ys = y_vector(&g, params.ell, k, params.p)?;
        Ok(TrialRow {
            trial: i,
            seed_key: seed.key(),
            edge_count: g.edge_count() as u64,
            z: None,
            ys,
            y_n: None,
            x: None,
        })
    })?;

    let series: Vec<Vec<f64>> =
        (0..k).map(|j| rows.iter().map(|r| r.ys[j]).collect()).collect();
    let mut out = skeleton(config, resolved);

    let mut means = vec![0.0; k];
    for j in 0..k {
        let (mean, var) = stats::mean_var(&series[j])?;
        means[j] = mean;
        out.metrics.insert(format!("mean_y{}", j + 1), mean);
        out.metrics.insert(format!("var_y{}", j + 1), var);
        let centered: Vec<f64> = series[j].iter().map(|v| v - mean).collect();
        let ks = stats::ks_one_sample(&centered, stats::normal_cdf)?;
        out.metrics.insert(format!("ks_y{}", j + 1), ks);
    }

    let denom = (config.trials - 1).max(1) as f64;
    let mut max_offdiag: f64 = 0.0;
    for a in 0..k {
        for b in (a + 1)..k {
            let cov: f64 = series[a]
                .iter()
                .zip(&series[b])
                .map(|(x, y)| (x - means[a]) * (y - means[b]))
                .sum::<f64>()
                / denom;
            out.metrics.insert(format!("cov_y{}_y{}", a + 1, b + 1), cov);
            max_offdiag = max_offdiag.max(cov.abs());
        }
    }
    if k > 1 {
        out.metrics.insert("max_abs_offdiag".into(), max_offdiag);
    }

    let mut planted_means = vec![0.0; k];
    for j in 0..k {
        planted_means[j] =
            theory::planted_y_mean(config.n, config.r, config.ell, params.p, j + 1)?;
        out.references.insert(format!("planted_mean_y{}", j + 1), planted_means[j]);
    }
    out.references.insert("p".into(), params.p);
    out.references.insert("c_n".into(), resolved.c_n);

    match model {
        ModelKind::Null => {
            for j in 0..k {
                out.gates.push(GateReport::band(
                    &format!("mean_y{}", j + 1),
                    means[j],
                    -0.05,
                    0.05,
                ));
                out.gates.push(GateReport::band(
                    &format!("var_y{}", j + 1),
                    out.metrics[&format!("var_y{}", j + 1)],
                    0.9,
                    1.1,
                ));
            }
            if k > 1 {
                out.gates.push(GateReport::at_most("max_abs_offdiag", max_offdiag, 0.05));
            }
        }
        ModelKind::Planted => {
            for j in 0..k {
                let dev = means[j] - planted_means[j];
                out.gates.push(GateReport::band(
                    &format!("planted_dev_y{}", j + 1),
                    dev,
                    -0.05,
                    0.05,
                ));
                let (_, boot_sigma) = stats::bootstrap_mean_std(
                    &series[j],
                    BOOT_REPS,
                    Seed::new(root, BOOT_STREAM + j as u64),
                )?;
                out.gates.push(GateReport::band(
                    &format!("planted_sigmas_y{}", j + 1),
                    dev / boot_sigma,
                    -4.0,
                    4.0,
                ));
            }
        }
        ModelKind::PlantedPair => {
            for j in 0..k {
                let dev = means[j] - 2.0 * planted_means[j];
                out.gates.push(GateReport::band(
                    &format!("pair_dev_y{}", j + 1),
                    dev,
                    -0.07,
                    0.07,
                ));
            }
        }
    }

    out.rows = rows;
    Ok(out)
}

/// Exact cross-validation bundle at enumeration scale: overlap table
/// identities, the two-route second moment, sampled planted means against
/// the closed form, and the big-overlap exclusion scan.
fn run_oracle_suite(config: &ExperimentConfig, resolved: &Resolved) -> Result<ExperimentResult> {
    let params = resolved.params;
    let mut out = skeleton(config, resolved);

    let table = oracle::overlap_table(config.n, config.r, config.ell)?;
    table.check_consistency()?;
    let sm = oracle::second_moment_check(config.n, config.r, config.ell, params.p)?;
    out.gates.push(GateReport::band(
        "second_moment_routes_equal",
        if sm.routes_equal { 1.0 } else { 0.0 },
        1.0,
        1.0,
    ));
    out.gates
        .push(GateReport::band("second_moment_residual", sm.route_residual, 0.0, 1e-12));

    let planted_gates =
        oracle::planted_mean_report(&params, resolved.k, config.trials, config.seed, 0.5)?;
    out.gates.extend(planted_gates);

    let scan = oracle::big_overlap_scan(config.n, config.r, config.ell, config.trials, config.seed)?;
    out.gates.extend(scan.gates.clone());

    out.metrics.insert("second_moment_ratio".into(), sm.ratio);
    out.metrics.insert("big_overlap_frequency".into(), scan.frequency);
    out.references.insert("e_z".into(), resolved.e_z);
    out.references.insert("p".into(), params.p);
    out.oracle_detail = Some(serde_json::json!({
        "overlap": {
            "copies": table.copies.to_string(),
            "pair_counts": table.pair_counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "row_counts": table.row_counts.clone(),
        },
        "second_moment": {
            "expected_z": sm.expected_z,
            "second_moment": sm.second_moment,
            "ratio": sm.ratio,
            "exact": sm.second_moment_exact,
        },
        "big_overlap": {
            "p": scan.p,
            "threshold_t": scan.threshold_t,
            "trials_with_big_pair": scan.trials_with_big_pair,
            "pairs_at_m_minus_1": scan.pairs_at_m_minus_1.to_string(),
            "max_offdiagonal_overlap": scan.max_offdiagonal_overlap,
        },
    }));
    Ok(out)
}

impl ExperimentResult {
    pub fn summary_json(&self) -> Result<serde_json::Value> {
        let config_toml = self.config.to_toml()?;
        let mut resolved = serde_json::json!({
            "n": self.config.n,
            "r": self.config.r,
            "ell": self.config.ell,
            "p": self.resolved.params.p,
            "c_n": self.resolved.c_n,
            "k": self.resolved.k,
            "e_z": self.resolved.e_z,
            "m_edges": self.resolved.params.m_edges(),
            "trials": self.config.trials,
            "seed": self.config.seed,
        });
        if let Some(law) = &self.resolved.law {
            resolved["law"] = serde_json::json!({
                "mu": law.mu,
                "sigma2": law.sigma2,
                "tail": law.tail,
                "weights": law.weights,
            });
        }
        let gates: Vec<serde_json::Value> = self
            .gates
            .iter()
            .map(|g| {
                serde_json::json!({
                    "name": g.name, "value": g.value, "lo": g.lo, "hi": g.hi, "pass": g.pass,
                })
            })
            .collect();
        let mut summary = serde_json::json!({
            "schema": 1,
            "experiment": self.config.experiment.name(),
            "config": config_toml,
            "resolved": resolved,
            "metrics": self.metrics,
            "references": self.references,
            "gates": gates,
            "pass": self.pass,
            "elapsed_ms": self.elapsed_ms as u64,
        });
        if let Some(detail) = &self.oracle_detail {
            summary["oracle"] = detail.clone();
        }
        Ok(summary)
    }

    /// Write trials.csv (plus trials_thinned.csv for the two-stage run)
    /// and summary.json under `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();

        let k = self.resolved.k;
        let csv_path = dir.join("trials.csv");
        write_csv(&csv_path, k, &self.rows)?;
        written.push(csv_path);
        if !self.thinned_rows.is_empty() {
            let path = dir.join("trials_thinned.csv");
            write_csv(&path, k, &self.thinned_rows)?;
            written.push(path);
        }

        let json_path = dir.join("summary.json");
        let mut file = fs::File::create(&json_path)?;
        serde_json::to_writer_pretty(&mut file, &self.summary_json()?)
            .map_err(|e| Error::Format(format!("summary serialize: {e}")))?;
        writeln!(file)?;
        written.push(json_path);
        Ok(written)
    }

    pub fn gate_lines(&self) -> String {
        let mut text = String::new();
        for gate in &self.gates {
            text.push_str(&gate.line());
            text.push('\n');
        }
        text.push_str(if self.pass { "overall: PASS\n" } else { "overall: FAIL\n" });
        text
    }
}

fn write_csv(path: &Path, k: usize, rows: &[TrialRow]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let mut text = csv_header(k);
    text.push('\n');
    for row in rows {
        text.push_str(&row.csv_line(k));
        text.push('\n');
    }
    file.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GateSpec;

    fn poisson_config() -> ExperimentConfig {
        ExperimentConfig {
            experiment: ExperimentKind::Poisson,
            n: 12,
            r: 4,
            ell: 3,
            p: None,
            c: None,
            target_m: Some(2.0),
            k: Some(3),
            trials: 60,
            seed: 5,
            workers: Some(1),
            model: None,
            overlap_t: None,
            two_stage: Some(true),
            enum_cap: None,
            out_dir: None,
            gates: vec![],
        }
    }

    #[test]
    fn csv_line_layout_matches_header() {
        let row = TrialRow {
            trial: 3,
            seed_key: 99,
            edge_count: 17,
            z: Some(BigUint::from(12u32)),
            ys: vec![0.5, -1.25],
            y_n: Some(0.75),
            x: None,
        };
        let header = csv_header(2);
        let line = row.csv_line(2);
        assert_eq!(header.split(',').count(), line.split(',').count());
        assert_eq!(line, "3,99,17,12,0.5,-1.25,0.75,,0");
        // A row lacking the count leaves the Z cell empty instead of
        // inventing a value.
        let bare = TrialRow { z: None, ys: vec![], y_n: None, ..row };
        assert_eq!(bare.csv_line(2), "3,99,17,,,,,,0");
    }

    #[test]
    fn degenerate_density_is_deterministic() {
        // p = 1 pins the graph to the complete hypergraph, so Z = N_C in
        // every trial and both the spread and the cv2 gate margin vanish.
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::Concentration,
            n: 9,
            r: 4,
            ell: 3,
            p: Some(1.0),
            c: None,
            target_m: None,
            k: Some(2),
            trials: 5,
            seed: 1,
            workers: Some(1),
            model: None,
            overlap_t: None,
            two_stage: None,
            enum_cap: None,
            out_dir: None,
            gates: vec![],
        };
        let result = run(&cfg).unwrap();
        assert_eq!(result.metrics["cv2"], 0.0);
        assert!((result.metrics["mean_ratio"] - 1.0).abs() < 1e-12);
        let z = result.rows[0].z.as_ref().unwrap();
        assert!(result.rows.iter().all(|r| r.z.as_ref().unwrap() == z));
    }

    #[test]
    fn config_gates_check_named_metrics() {
        let mut cfg = poisson_config();
        cfg.trials = 40;
        cfg.two_stage = None;
        cfg.gates = vec![GateSpec { name: "mean_ratio".into(), lo: 10.0, hi: 11.0 }];
        let result = run(&cfg).unwrap();
        assert!(!result.pass, "an impossible band must fail the run");
        assert!(result.gates.iter().any(|g| g.name == "mean_ratio" && !g.pass));

        cfg.gates = vec![GateSpec { name: "no_such_metric".into(), lo: 0.0, hi: 1.0 }];
        assert!(run(&cfg).is_err(), "unknown metric names are config errors");
    }

    #[test]
    fn two_stage_pipeline_rows_are_coupled_to_their_own_lane() {
        let result = run(&poisson_config()).unwrap();
        assert_eq!(result.rows.len(), result.thinned_rows.len());
        // Different stream lanes: the pipelines are independent samples,
        // not copies of each other.
        assert_ne!(result.rows[0].seed_key, result.thinned_rows[0].seed_key);
        assert!(result.metrics.contains_key("ks_pipelines"));
        // Replay determinism at the row level.
        let again = run(&poisson_config()).unwrap();
        assert_eq!(result.rows[7].csv_line(3), again.rows[7].csv_line(3));
        assert_eq!(result.thinned_rows[7].csv_line(3), again.thinned_rows[7].csv_line(3));
    }

    #[test]
    fn worker_count_never_changes_rows() {
        let mut one = poisson_config();
        one.trials = 30;
        one.two_stage = None;
        let mut four = one.clone();
        four.workers = Some(4);
        let a = run(&one).unwrap();
        let b = run(&four).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.csv_line(3), rb.csv_line(3));
        }
        assert_eq!(a.metrics, b.metrics);
    }
}
