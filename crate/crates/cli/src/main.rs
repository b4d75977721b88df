//! hamlaw: sample, count, and statistically test Hamilton l-cycle models
//! in random uniform hypergraphs.
//!
//! Exit codes follow the harness contract: 0 when the command succeeds and
//! every acceptance gate passes, 1 when the run finished but a gate
//! failed, 2 for anything that prevented a verdict (bad arguments,
//! unreadable files, infeasible parameters).

use std::fs;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hamlaw_cli::config::ExperimentConfig;
use hamlaw_cli::experiment;
use hamlaw_core::aut::{compute_a_table, cycle_aut, cycle_copies};
use hamlaw_core::count::{count_hamilton, CountMethod};
use hamlaw_core::models::sample_gnp;
use hamlaw_core::oracle;
use hamlaw_core::rng::Seed;
use hamlaw_core::stats::GateReport;
use hamlaw_core::theory;
use hamlaw_core::ystat::y_vector;
use hamlaw_core::{derive_constants, Error, Hypergraph, Params, Result};

#[derive(Parser)]
#[command(
    name = "hamlaw",
    version,
    about = "Hamilton l-cycle counts in random hypergraphs: exact tools and statistical experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural constants of the (r, ell) cycle shape.
    Constants {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        /// Evaluate the cycle automorphism count and N_C at this n.
        #[arg(long)]
        n: Option<usize>,
        /// Depth of the A_k table (default: stabilization point + 5).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Draw one G_r(n, p) sample and write it out.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        p: Option<f64>,
        /// Density as a multiple of the first-moment threshold p*.
        #[arg(long)]
        c: Option<f64>,
        /// Density solving E[Z] = target exactly.
        #[arg(long)]
        target_m: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the compact binary form instead of text.
        #[arg(long)]
        binary: bool,
    },
    /// Count Hamilton ell-cycles in a serialized hypergraph exactly.
    Count {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ell: usize,
        /// auto | dp | backtrack
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the path statistics Y(P_1)..Y(P_k) of a serialized graph.
    StatY {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        k: usize,
        /// Null density the statistic is centered at.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        json: bool,
    },
    /// Finite-n parameter sheet: threshold, E[Z], and the truncated law.
    Theory {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Exact cross-checks at enumeration scale.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
    /// Run a configured experiment: CSV of trials plus a gated summary.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's root seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the config's worker count.
        #[arg(long)]
        workers: Option<usize>,
        /// Print the summary JSON to stdout as well.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum OracleCheck {
    /// Exhaustive pairwise overlap distribution of cycle copies.
    Overlap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        json: bool,
    },
    /// E[Z^2] three ways: enumeration, conditioned form, transitivity.
    SecondMoment {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        json: bool,
    },
    /// Sampled planted means against the exact closed form.
    PlantedMean {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// E[X] under the null against E*[e^{-Y_N}] under planting.
    PlantedMgf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 400)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Frequency of heavily overlapping cycle pairs near the threshold.
    BigOverlap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether all gates passed; commands without gates return true.
fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Constants { r, ell, n, k, json } => cmd_constants(r, ell, n, k, json),
        Command::Sample { n, r, ell, p, c, target_m, seed, out, binary } => {
            cmd_sample(n, r, ell, p, c, target_m, seed, out, binary)
        }
        Command::Count { input, ell, method, json } => cmd_count(&input, ell, &method, json),
        Command::StatY { input, ell, k, p, json } => cmd_stat_y(&input, ell, k, p, json),
        Command::Theory { n, r, ell, p, c, k, json } => cmd_theory(n, r, ell, p, c, k, json),
        Command::Oracle { check } => cmd_oracle(check),
        Command::Experiment { config, seed, trials, out_dir, workers, json } => {
            cmd_experiment(&config, seed, trials, out_dir, workers, json)
        }
    }
}

fn resolve_density(
    n: usize,
    r: usize,
    ell: usize,
    p: Option<f64>,
    c: Option<f64>,
    target_m: Option<f64>,
) -> Result<f64> {
    match (p, c, target_m) {
        (Some(p), None, None) => Ok(p),
        (None, Some(c), None) => theory::p_star(n, r, ell, c),
        (None, None, Some(t)) => theory::p_for_expectation(n, r, ell, t),
        _ => Err(Error::InvalidParams("set exactly one of --p, --c, --target-m".into())),
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json printable"));
}

fn cmd_constants(r: usize, ell: usize, n: Option<usize>, k: Option<usize>, json: bool) -> Result<bool> {
    let shape = derive_constants(r, ell)?;
    let depth = match k {
        Some(k) => k,
        None => theory::default_truncation(r, ell).unwrap_or(8),
    };
    let table = compute_a_table(r, ell, depth)?;
    let (aut, copies) = match n {
        Some(n) => {
            let aut = cycle_aut(n, r, ell)?;
            let copies = cycle_copies(n, r, ell)?;
            (Some(aut.to_string()), Some(copies.to_string()))
        }
        None => (None, None),
    };
    if json {
        print_json(&serde_json::json!({
            "s": shape.step,
            "t": shape.offset,
            "lambda": shape.lambda,
            "A": table.values,
            "k_stab": table.k_stab,
            "aut_cycle": aut,
            "N_C": copies,
        }));
    } else {
        println!("cycle shape r={r} ell={ell}: s={} t={} lambda={}", shape.step, shape.offset, shape.lambda);
        println!(
            "A table: {:?}{}",
            table.values,
            match table.k_stab {
                Some(k) => format!(" (stabilizes at k={k})"),
                None => " (no stabilization within brute-force reach)".to_string(),
            }
        );
        if let (Some(aut), Some(copies)) = (&aut, &copies) {
            println!("n={}: |Aut(C)| = {aut}, N_C = {copies}", n.expect("set with aut"));
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    n: usize,
    r: usize,
    ell: usize,
    p: Option<f64>,
    c: Option<f64>,
    target_m: Option<f64>,
    seed: u64,
    out: Option<PathBuf>,
    binary: bool,
) -> Result<bool> {
    let p = resolve_density(n, r, ell, p, c, target_m)?;
    let params = Params::new(n, r, ell, p)?;
    let g = sample_gnp(&params, Seed::new(seed, 0))?;
    match out {
        Some(path) => {
            let mut file = fs::File::create(&path)?;
            if binary {
                g.write_binary(&mut file)?;
            } else {
                g.write_text(&mut file)?;
            }
            eprintln!("wrote {} edges at p={p} to {}", g.edge_count(), path.display());
        }
        None => {
            if binary {
                return Err(Error::InvalidParams("--binary needs --out, not a terminal".into()));
            }
            let mut buf = Vec::new();
            g.write_text(&mut buf)?;
            std::io::stdout().write_all(&buf)?;
        }
    }
    Ok(true)
}

fn read_graph(path: &Path) -> Result<Hypergraph> {
    let file = fs::File::open(path)
        .map_err(|e| Error::Format(format!("graph {}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let mut magic = [0u8; 4];
    let got = reader.read(&mut magic)?;
    let prefix = &magic[..got];
    if prefix == b"HGR1" {
        let rest = {
            let mut rest = Vec::new();
            reader.read_to_end(&mut rest)?;
            rest
        };
        let mut full = magic.to_vec();
        full.extend(rest);
        Hypergraph::read_binary(&mut full.as_slice())
    } else {
        let mut text = String::from_utf8(prefix.to_vec())
            .map_err(|_| Error::Format("graph file is neither HGR1 binary nor text".into()))?;
        reader
            .read_to_string(&mut text)
            .map_err(|_| Error::Format("graph file is neither HGR1 binary nor text".into()))?;
        Hypergraph::read_text(text.as_bytes())
    }
}

fn cmd_count(input: &Path, ell: usize, method: &str, json: bool) -> Result<bool> {
    let g = read_graph(input)?;
    let method = match method {
        "auto" => CountMethod::Auto,
        "dp" => CountMethod::SubsetDp,
        "backtrack" => CountMethod::Backtracking,
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown method {other:?}, expected auto | dp | backtrack"
            )))
        }
    };
    let out = count_hamilton(&g, ell, method)?;
    if json {
        print_json(&serde_json::json!({
            "count": out.count.to_string(),
            "method": out.method,
            "nodes": out.nodes,
            "elapsed_ms": out.elapsed.as_millis() as u64,
        }));
    } else {
        println!(
            "Z = {} ({}, {} nodes, {} ms)",
            out.count,
            out.method,
            out.nodes,
            out.elapsed.as_millis()
        );
    }
    Ok(true)
}

fn cmd_stat_y(input: &Path, ell: usize, k: usize, p: f64, json: bool) -> Result<bool> {
    let g = read_graph(input)?;
    let ys = y_vector(&g, ell, k, p)?;
    // The combined Y_N needs the limit weights, which only exist for the
    // lognormal regime at a convergent plug-in scale.
    let y_n = theory::plugin_scale(g.n(), g.r(), ell, p)
        .and_then(|c_n| theory::limit_law(g.r(), ell, c_n, k))
        .map(|law| law.combine(&ys))
        .ok();
    if json {
        print_json(&serde_json::json!({
            "k": k,
            "p": p,
            "y": ys,
            "y_n": y_n,
        }));
    } else {
        for (j, y) in ys.iter().enumerate() {
            println!("Y_{} = {y}", j + 1);
        }
        match y_n {
            Some(y) => println!("Y_N = {y}"),
            None => println!("Y_N undefined here (no convergent weight series)"),
        }
    }
    Ok(true)
}

fn cmd_theory(
    n: usize,
    r: usize,
    ell: usize,
    p: Option<f64>,
    c: Option<f64>,
    k: Option<usize>,
    json: bool,
) -> Result<bool> {
    let p_star = theory::p_star(n, r, ell, 1.0)?;
    let p = resolve_density(n, r, ell, p, c, None)?;
    let c_n = theory::plugin_scale(n, r, ell, p)?;
    let k = match k {
        Some(k) => k,
        None => theory::default_truncation(r, ell).unwrap_or(8),
    };
    let (_, e_z) = theory::expected_z(n, r, ell, p)?;
    let law = if ell == 2 { theory::limit_law(r, ell, c_n, k).ok() } else { None };
    let finite_sigma2 = theory::finite_size_sigma2(n, r, ell, p, k)?;
    if json {
        print_json(&serde_json::json!({
            "p_star": p_star,
            "p": p,
            "c_n": c_n,
            "E_Z": e_z,
            "mu": law.as_ref().map(|l| l.mu),
            "sigma2": law.as_ref().map(|l| l.sigma2),
            "tail": law.as_ref().map(|l| l.tail),
            "K": k,
            "finite_size_sigma2": finite_sigma2,
        }));
    } else {
        println!("p* = {p_star}, p = {p} (c_n = {c_n}), E[Z] = {e_z}, K = {k}");
        match &law {
            Some(l) => println!(
                "log(Z/E[Z]) reference: Normal(mu = {}, sigma2 = {}), tail <= {}",
                l.mu, l.sigma2, l.tail
            ),
            None => println!(
                "no lognormal law in this regime; finite-size sigma2 = {finite_sigma2}"
            ),
        }
    }
    Ok(true)
}

fn report_gates(gates: &[GateReport], json_extra: Option<serde_json::Value>, json: bool) -> bool {
    let pass = gates.iter().all(|g| g.pass);
    if json {
        let mut value = serde_json::json!({
            "gates": gates,
            "pass": pass,
        });
        if let Some(extra) = json_extra {
            for (k, v) in extra.as_object().cloned().unwrap_or_default() {
                value[k] = v;
            }
        }
        print_json(&value);
    } else {
        for gate in gates {
            println!("{}", gate.line());
        }
        println!("overall: {}", if pass { "PASS" } else { "FAIL" });
    }
    pass
}

fn cmd_oracle(check: OracleCheck) -> Result<bool> {
    match check {
        OracleCheck::Overlap { n, r, ell, json } => {
            let table = oracle::overlap_table(n, r, ell)?;
            table.check_consistency()?;
            if json {
                print_json(&serde_json::json!({
                    "n": n, "r": r, "ell": ell, "m": table.m,
                    "copies": table.copies.to_string(),
                    "pair_counts": table.pair_counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "row_counts": table.row_counts,
                    "consistent": true,
                }));
            } else {
                println!("N_C = {} copies, m = {}", table.copies, table.m);
                for (t, count) in table.pair_counts.iter().enumerate() {
                    println!("  pairs sharing {t} edges: {count}");
                }
                println!("identities: total = N_C^2, diagonal = N_C, overlap m-1 empty");
            }
            Ok(true)
        }
        OracleCheck::SecondMoment { n, r, ell, p, json } => {
            let report = oracle::second_moment_check(n, r, ell, p)?;
            let gates = vec![
                GateReport::band(
                    "routes_equal",
                    if report.routes_equal { 1.0 } else { 0.0 },
                    1.0,
                    1.0,
                ),
                GateReport::band("route_residual", report.route_residual, 0.0, 1e-12),
            ];
            let extra = serde_json::json!({
                "expected_z": report.expected_z,
                "second_moment": report.second_moment,
                "ratio": report.ratio,
                "second_moment_exact": report.second_moment_exact,
            });
            if !json {
                println!(
                    "E[Z] = {}, E[Z^2] = {} (exact {}), ratio = {}",
                    report.expected_z, report.second_moment, report.second_moment_exact, report.ratio
                );
            }
            Ok(report_gates(&gates, Some(extra), json))
        }
        OracleCheck::PlantedMean { n, r, ell, p, k, trials, seed, json } => {
            let params = Params::new(n, r, ell, p)?;
            let gates = oracle::planted_mean_report(&params, k, trials, seed, 0.25)?;
            Ok(report_gates(&gates, None, json))
        }
        OracleCheck::PlantedMgf { n, r, ell, c, k, trials, seed, json } => {
            let report = oracle::planted_mgf_report(n, r, ell, c, k, trials, seed, 0.25)?;
            let extra = serde_json::json!({
                "reference": report.reference,
                "planted_mean": report.planted_mean,
                "planted_sigma": report.planted_sigma,
                "null_x_mean": report.null_x_mean,
                "null_x_sigma": report.null_x_sigma,
            });
            if !json {
                println!(
                    "planted E*[e^-Y] = {} +- {}, null E[X] = {} +- {}, limit {}",
                    report.planted_mean,
                    report.planted_sigma,
                    report.null_x_mean,
                    report.null_x_sigma,
                    report.reference
                );
            }
            Ok(report_gates(&report.gates, Some(extra), json))
        }
        OracleCheck::BigOverlap { n, r, ell, trials, seed, json } => {
            let report = oracle::big_overlap_scan(n, r, ell, trials, seed)?;
            let extra = serde_json::json!({
                "p": report.p,
                "threshold_t": report.threshold_t,
                "trials_with_big_pair": report.trials_with_big_pair,
                "frequency": report.frequency,
                "pairs_at_m_minus_1": report.pairs_at_m_minus_1.to_string(),
                "max_offdiagonal_overlap": report.max_offdiagonal_overlap,
            });
            if !json {
                println!(
                    "{} of {} trials had a pair sharing >= {} edges (max off-diagonal overlap {})",
                    report.trials_with_big_pair, trials, report.threshold_t, report.max_offdiagonal_overlap
                );
            }
            Ok(report_gates(&report.gates, Some(extra), json))
        }
    }
}

fn cmd_experiment(
    config_path: &Path,
    seed: Option<u64>,
    trials: Option<usize>,
    out_dir: Option<PathBuf>,
    workers: Option<usize>,
    json: bool,
) -> Result<bool> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(trials) = trials {
        config.trials = trials;
    }
    if let Some(dir) = out_dir {
        config.out_dir = Some(dir);
    }
    if let Some(workers) = workers {
        config.workers = Some(workers);
    }

    let result = experiment::run(&config)?;
    let dir = config
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("runs/{}-seed{}", config.experiment.name(), config.seed)));
    let written = result.write_outputs(&dir)?;

    if json {
        print_json(&result.summary_json()?);
    } else {
        print!("{}", result.gate_lines());
        for path in &written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(result.pass)
}
