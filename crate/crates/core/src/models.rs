//! Random hypergraph models: the null model G_r(n, p), planted-cycle
//! variants, and probability thinning.
//!
//! Edge indicators are keyed draws on the edge's rank, so all models at a
//! fixed seed share one underlying uniform array: the graphs at two
//! densities are coupled monotonically, and the planted models differ from
//! the null model only by the forced cycle edges. Planting applies a
//! uniform random permutation to the canonical cycle, which hits every
//! copy with probability |Aut| / n!, i.e. uniformly.

use crate::error::{Error, Result};
use crate::graph::Hypergraph;
use crate::params::Params;
use crate::pattern::CycleCopy;
use crate::rng::{draw_u64, tag, threshold_u64, Seed, SeqStream};

/// A sampled graph together with the cycles forced into it.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: Hypergraph,
    pub planted: CycleCopy,
    pub second: Option<CycleCopy>,
    /// Exact number of edges the two cycles share, when two were planted.
    pub overlap: Option<usize>,
    /// Which construction produced the second cycle.
    pub scheme: &'static str,
}

/// Sample G_r(n, p): every r-subset appears independently with
/// probability p.
pub fn sample_gnp(params: &Params, seed: Seed) -> Result<Hypergraph> {
    let space = crate::binom::binomial_u64(params.n as u64, params.r as u64)
        .expect("validated by Params");
    let thr = threshold_u64(params.p);
    let ranks: Vec<u64> = (0..space)
        .filter(|&rk| draw_u64(seed, tag::EDGE, rk) < thr)
        .collect();
    Hypergraph::from_ranks(params.n, params.r, ranks)
}

fn background_union(params: &Params, seed: Seed, forced: &mut Vec<u64>) -> Result<Hypergraph> {
    let space = crate::binom::binomial_u64(params.n as u64, params.r as u64)
        .expect("validated by Params");
    let thr = threshold_u64(params.p);
    forced.sort_unstable();
    forced.dedup();
    let mut ranks = Vec::new();
    for rk in 0..space {
        if draw_u64(seed, tag::EDGE, rk) < thr || forced.binary_search(&rk).is_ok() {
            ranks.push(rk);
        }
    }
    Hypergraph::from_ranks(params.n, params.r, ranks)
}

fn random_cycle(params: &Params, stream: &mut SeqStream) -> Result<CycleCopy> {
    let mut seq: Vec<u16> = (0..params.n as u16).collect();
    stream.shuffle(&mut seq);
    CycleCopy::from_sequence(seq, params.r, params.ell)
}

/// Plant a uniformly random Hamilton l-cycle and overlay G_r(n, p).
pub fn plant_cycle(params: &Params, seed: Seed) -> Result<PlantedInstance> {
    let mut stream = SeqStream::new(seed, tag::PERM);
    let planted = random_cycle(params, &mut stream)?;
    let mut forced = planted.sorted_ranks();
    let graph = background_union(params, seed, &mut forced)?;
    Ok(PlantedInstance { graph, planted, second: None, overlap: None, scheme: "single" })
}

const TWO_CYCLE_ATTEMPTS: u64 = 200_000;

/// Plant two Hamilton l-cycles sharing exactly `overlap` edges, then
/// overlay G_r(n, p).
///
/// `overlap = m` plants the same cycle twice. For tight cycles an overlap
/// of m - 1 is impossible: the missing window is determined by the m - 1
/// shared ones, so two distinct tight cycles can never disagree on exactly
/// one edge; that request is rejected outright. Otherwise the second cycle
/// is built by copying the vertex run under the first `overlap` windows
/// and shuffling the remaining vertices ("segment"), falling back to full
/// rejection sampling ("rejection") when the run would not fit or when the
/// graph is small enough that rejection is cheap. Either way the overlap
/// is re-verified exactly and near-misses are resampled.
pub fn plant_two_cycles(params: &Params, overlap: usize, seed: Seed) -> Result<PlantedInstance> {
    let shape = params.shape();
    let m = params.m_edges();
    if overlap > m {
        return Err(Error::InvalidParams(format!(
            "overlap {overlap} exceeds the cycle edge count {m}"
        )));
    }
    let mut stream = SeqStream::new(seed, tag::PERM);
    let first = random_cycle(params, &mut stream)?;

    if overlap == m {
        let second = first.clone();
        let mut forced = first.sorted_ranks();
        let graph = background_union(params, seed, &mut forced)?;
        return Ok(PlantedInstance {
            graph,
            planted: first,
            second: Some(second),
            overlap: Some(m),
            scheme: "identical",
        });
    }
    if shape.step == 1 && overlap == m - 1 {
        return Err(Error::Infeasible(
            "two distinct tight Hamilton cycles cannot share exactly m - 1 edges".into(),
        ));
    }

    let seg_len = overlap * shape.step + params.ell;
    let use_segment = overlap >= 1 && seg_len <= params.n && params.n > 12;
    let scheme = if use_segment { "segment" } else { "rejection" };
    let mut plant2 = SeqStream::new(seed, tag::PLANT2);
    let mut attempts: u64 = 0;
    let second = loop {
        attempts += 1;
        if attempts > TWO_CYCLE_ATTEMPTS {
            return Err(Error::ResourceLimit(format!(
                "no second cycle with overlap exactly {overlap} found in {TWO_CYCLE_ATTEMPTS} attempts ({scheme})"
            )));
        }
        let candidate = if use_segment {
            // Copy the vertex run spanned by windows 0..overlap-1 of the
            // first cycle, then lay the remaining vertices out randomly.
            let mut seq: Vec<u16> = first.seq[..seg_len].to_vec();
            let mut rest: Vec<u16> = first.seq[seg_len..].to_vec();
            plant2.shuffle(&mut rest);
            seq.extend_from_slice(&rest);
            CycleCopy::from_sequence(seq, params.r, params.ell)?
        } else {
            random_cycle(params, &mut plant2)?
        };
        if first.overlap(&candidate) == overlap {
            break candidate;
        }
    };

    let mut forced = first.sorted_ranks();
    forced.extend(second.sorted_ranks());
    let graph = background_union(params, seed, &mut forced)?;
    Ok(PlantedInstance {
        graph,
        planted: first,
        second: Some(second),
        overlap: Some(overlap),
        scheme,
    })
}

/// Keep each edge of `g` independently with probability `keep`.
///
/// Retention draws are keyed by edge rank under their own tag, so thinning
/// commutes with the sampling coupling: thinning a denser graph keeps a
/// superset of what thinning a sparser one keeps.
pub fn thin(g: &Hypergraph, keep: f64, seed: Seed) -> Result<Hypergraph> {
    if !(0.0..=1.0).contains(&keep) || !keep.is_finite() {
        return Err(Error::InvalidParams(format!("retention probability {keep} must lie in [0, 1]")));
    }
    let thr = threshold_u64(keep);
    let ranks: Vec<u64> = g
        .ranks()
        .iter()
        .copied()
        .filter(|&rk| draw_u64(seed, tag::THIN, rk) < thr)
        .collect();
    Hypergraph::from_ranks(g.n(), g.r(), ranks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn gnp_edge_count_tracks_expectation() {
        let params = Params::new(12, 3, 2, 0.3).unwrap();
        let mut total = 0usize;
        let trials = 200;
        for t in 0..trials {
            total += sample_gnp(&params, Seed::new(77, t)).unwrap().edge_count();
        }
        let mean = total as f64 / trials as f64;
        let expect = 0.3 * 220.0;
        // sd of the mean is about sqrt(220 * 0.21 / 200) ~ 0.48.
        assert!((mean - expect).abs() < 2.5, "mean {mean} expect {expect}");
    }

    #[test]
    fn density_coupling_is_monotone() {
        let lo = Params::new(10, 3, 2, 0.2).unwrap();
        let hi = Params::new(10, 3, 2, 0.5).unwrap();
        for t in 0..20 {
            let seed = Seed::new(5, t);
            let a = sample_gnp(&lo, seed).unwrap();
            let b = sample_gnp(&hi, seed).unwrap();
            assert!(a.ranks().iter().all(|rk| b.contains_rank(*rk)));
        }
    }

    #[test]
    fn planted_cycle_is_present_and_background_is_shared() {
        let params = Params::new(12, 3, 2, 0.15).unwrap();
        for t in 0..10 {
            let seed = Seed::new(9, t);
            let inst = plant_cycle(&params, seed).unwrap();
            for rk in inst.planted.sorted_ranks() {
                assert!(inst.graph.contains_rank(rk));
            }
            // The same seed's null graph is a subset: planting only adds.
            let null = sample_gnp(&params, seed).unwrap();
            assert!(null.ranks().iter().all(|rk| inst.graph.contains_rank(*rk)));
            let forced = inst.planted.sorted_ranks();
            assert!(inst
                .graph
                .ranks()
                .iter()
                .all(|rk| null.contains_rank(*rk) || forced.binary_search(rk).is_ok()));
        }
    }

    #[test]
    fn planting_is_uniform_over_copies() {
        // n=5, r=3, l=2 has exactly 12 copies; with p=0 the graph is the
        // copy itself. Chi-square-style band: expected 200 per copy,
        // sd ~ 13.5, allow 5 sigma.
        let params = Params::new(5, 3, 2, 0.0).unwrap();
        let mut counts: HashMap<Vec<u64>, u32> = HashMap::new();
        for t in 0..2400 {
            let inst = plant_cycle(&params, Seed::new(31, t)).unwrap();
            *counts.entry(inst.planted.sorted_ranks()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 12);
        for (_, c) in counts {
            assert!((c as i64 - 200).abs() < 68, "copy count {c}");
        }
    }

    #[test]
    fn two_cycles_hit_requested_overlap_exactly() {
        let params = Params::new(14, 3, 2, 0.05).unwrap();
        for overlap in [0usize, 1, 2, 5, 8] {
            let inst = plant_two_cycles(&params, overlap, Seed::new(3, overlap as u64)).unwrap();
            let second = inst.second.as_ref().unwrap();
            assert_eq!(inst.planted.overlap(second), overlap, "overlap {overlap}");
            assert_eq!(inst.overlap, Some(overlap));
            for rk in second.sorted_ranks() {
                assert!(inst.graph.contains_rank(rk));
            }
        }
    }

    #[test]
    fn two_cycles_small_n_uses_rejection() {
        let params = Params::new(8, 3, 2, 0.0).unwrap();
        let inst = plant_two_cycles(&params, 3, Seed::new(4, 0)).unwrap();
        assert_eq!(inst.scheme, "rejection");
        assert_eq!(inst.planted.overlap(inst.second.as_ref().unwrap()), 3);
    }

    #[test]
    fn two_identical_cycles() {
        let params = Params::new(12, 5, 2, 0.0).unwrap();
        let m = params.m_edges();
        let inst = plant_two_cycles(&params, m, Seed::new(6, 0)).unwrap();
        assert_eq!(inst.scheme, "identical");
        assert_eq!(inst.graph.edge_count(), m);
    }

    #[test]
    fn tight_overlap_m_minus_one_is_impossible() {
        let params = Params::new(10, 3, 2, 0.1).unwrap();
        match plant_two_cycles(&params, 9, Seed::new(7, 0)) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn overlap_beyond_m_rejected() {
        let params = Params::new(10, 3, 2, 0.1).unwrap();
        assert!(plant_two_cycles(&params, 11, Seed::new(7, 0)).is_err());
    }

    #[test]
    fn thinning_identity_and_subset() {
        let params = Params::new(12, 3, 2, 0.4).unwrap();
        let g = sample_gnp(&params, Seed::new(15, 0)).unwrap();
        let all = thin(&g, 1.0, Seed::new(15, 0)).unwrap();
        assert_eq!(all.ranks(), g.ranks());
        let none = thin(&g, 0.0, Seed::new(15, 0)).unwrap();
        assert_eq!(none.edge_count(), 0);
        let half = thin(&g, 0.5, Seed::new(15, 0)).unwrap();
        assert!(half.ranks().iter().all(|rk| g.contains_rank(*rk)));
    }

    #[test]
    fn thinning_is_monotone_in_retention() {
        let params = Params::new(12, 3, 2, 0.5).unwrap();
        for t in 0..10 {
            let seed = Seed::new(21, t);
            let g = sample_gnp(&params, seed).unwrap();
            let a = thin(&g, 0.3, seed).unwrap();
            let b = thin(&g, 0.7, seed).unwrap();
            assert!(a.ranks().iter().all(|rk| b.contains_rank(*rk)));
        }
    }
}
