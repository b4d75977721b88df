//! Randomized invariants over the combinatorial layer: subset ranking,
//! relabeling, edge monotonicity, and the thinning coupling.

use hamlaw_core::binom::binomial_u64;
use hamlaw_core::count::{count_hamilton, CountMethod};
use hamlaw_core::graph::{rank_of, unrank, Hypergraph};
use hamlaw_core::models::thin;
use hamlaw_core::rng::Seed;
use proptest::prelude::*;

/// A graph on n vertices from an arbitrary subset of the rank space.
fn arb_graph(n: usize, r: usize) -> impl Strategy<Value = Hypergraph> {
    let space = binomial_u64(n as u64, r as u64).unwrap();
    proptest::collection::btree_set(0..space, 0..=(space as usize).min(80)).prop_map(
        move |ranks| {
            Hypergraph::from_ranks(n, r, ranks.into_iter().collect()).unwrap()
        },
    )
}

proptest! {
    #[test]
    fn rank_of_inverts_unrank(n in 3usize..20, r in 2usize..5, raw in 0u64..u64::MAX) {
        prop_assume!(r < n);
        let space = binomial_u64(n as u64, r as u64).unwrap();
        let rank = raw % space;
        let verts = unrank(n, r, rank);
        prop_assert_eq!(verts.len(), r);
        prop_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!((*verts.last().unwrap() as usize) < n);
        prop_assert_eq!(rank_of(&verts), rank);
    }

    #[test]
    fn relabeling_preserves_the_cycle_count(
        g in arb_graph(7, 3),
        perm_seed in any::<u64>(),
    ) {
        let mut perm: Vec<u16> = (0..7).collect();
        // Fisher-Yates off a seeded stream.
        let mut state = perm_seed;
        for i in (1..perm.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let base = count_hamilton(&g, 2, CountMethod::Auto).unwrap().count;
        let relabeled = g.relabel(&perm).unwrap();
        let after = count_hamilton(&relabeled, 2, CountMethod::Auto).unwrap().count;
        prop_assert_eq!(base, after);
    }

    #[test]
    fn adding_an_edge_never_loses_cycles(
        g in arb_graph(7, 3),
        extra in 0u64..35,
    ) {
        prop_assume!(!g.contains_rank(extra));
        let mut ranks = g.ranks().to_vec();
        ranks.push(extra);
        let bigger = Hypergraph::from_ranks(7, 3, ranks).unwrap();
        let before = count_hamilton(&g, 2, CountMethod::Auto).unwrap().count;
        let after = count_hamilton(&bigger, 2, CountMethod::Auto).unwrap().count;
        prop_assert!(after >= before, "{after} < {before}");
    }

    #[test]
    fn thinning_couples_monotonically(
        g in arb_graph(9, 3),
        keep_lo in 0.0f64..1.0,
        keep_hi in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let (lo, hi) = if keep_lo <= keep_hi { (keep_lo, keep_hi) } else { (keep_hi, keep_lo) };
        let s = Seed::new(seed, 0);
        let thin_lo = thin(&g, lo, s).unwrap();
        let thin_hi = thin(&g, hi, s).unwrap();
        // Same seed, larger retention: strictly more generous filter.
        prop_assert!(thin_lo.ranks().iter().all(|rk| thin_hi.contains_rank(*rk)));
        prop_assert!(thin_hi.ranks().iter().all(|rk| g.contains_rank(*rk)));
        let full = thin(&g, 1.0, s).unwrap();
        prop_assert_eq!(full.ranks(), g.ranks());
    }

    #[test]
    fn graph_files_round_trip(g in arb_graph(10, 3)) {
        let mut text = Vec::new();
        g.write_text(&mut text).unwrap();
        let back = Hypergraph::read_text(&text[..]).unwrap();
        prop_assert_eq!(back.ranks(), g.ranks());

        let mut bin = Vec::new();
        g.write_binary(&mut bin).unwrap();
        let back = Hypergraph::read_binary(&bin[..]).unwrap();
        prop_assert_eq!(back.ranks(), g.ranks());
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.r(), g.r());
    }
}
