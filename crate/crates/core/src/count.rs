//! Exact Hamilton l-cycle counting.
//!
//! Both kernels count vertex sequences whose windows all lie in the graph,
//! then convert to subgraph copies. For a spanning pattern the sequences
//! generating one copy are exactly the isomorphisms onto it, so the number
//! of sequences is Z * |Aut(C)|; the division is checked exactly and a
//! remainder is reported as an error rather than rounded away.
//!
//! Tight cycles (s = 1) get a layered subset dynamic program over states
//! (visited set, ordered last r-1 vertices), with vertex 0 pinned to
//! position 0 and runs grouped by the first r-2 positions so that the
//! wraparound windows can be checked at the final layer. Sequences with
//! vertex 0 elsewhere are recovered by rotation, hence the factor n.
//!
//! The general kernel backtracks over blocks of s consecutive positions.
//! Within a block, the first t positions and the last s - t positions each
//! belong to the same set of windows, so their internal order never
//! affects the window sets; the search fixes both groups in ascending
//! order and restores the lost orderings with a factor lambda^m. Rotations
//! by whole blocks are quotiented out by requiring vertex 0 in block 0 and
//! restored with a factor m. Once the first q = (r - t) / s blocks are
//! down, every later block placement completes exactly one window, whose
//! membership in the graph prunes the search; the q windows that wrap
//! around are checked at the leaves.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::aut::{cycle_aut, exact_div, path_aut};
use crate::error::{Error, Result};
use crate::graph::{rank_of, Hypergraph};
use crate::params::derive_constants;
use crate::pattern::{CycleCopy, PathPattern};

/// Kernel selection. `Auto` picks the subset DP for tight cycles when the
/// vertex count permits and backtracking otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Auto,
    SubsetDp,
    Backtracking,
}

/// Largest n the subset DP accepts (u32 visited masks, 5-bit packing).
pub const MAX_DP_VERTICES: usize = 24;

const NODE_LIMIT: u64 = 50_000_000_000;

#[derive(Debug, Clone)]
pub struct CountOutcome {
    pub count: BigUint,
    pub method: &'static str,
    /// Search-tree size indicator: transition attempts (DP) or placement
    /// attempts (backtracking).
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Count Hamilton l-cycles in `g` exactly.
pub fn count_hamilton(g: &Hypergraph, ell: usize, method: CountMethod) -> Result<CountOutcome> {
    let shape = derive_constants(g.r(), ell)?;
    let n = g.n();
    if n % shape.step != 0 || n < g.r() + shape.step {
        return Err(Error::InvalidParams(format!(
            "no Hamilton l-cycle exists on n={n} for r={}, l={ell}",
            g.r()
        )));
    }
    let use_dp = match method {
        CountMethod::SubsetDp => {
            if shape.step != 1 {
                return Err(Error::InvalidParams(
                    "the subset DP applies only to tight cycles (s = 1)".into(),
                ));
            }
            if n > MAX_DP_VERTICES {
                return Err(Error::ResourceLimit(format!(
                    "subset DP supports n <= {MAX_DP_VERTICES}, got {n}"
                )));
            }
            true
        }
        CountMethod::Backtracking => false,
        CountMethod::Auto => shape.step == 1 && n <= MAX_DP_VERTICES,
    };
    let start = Instant::now();
    let (sequences_total, nodes, method_name) = if use_dp {
        let (fixed, nodes) = tight_dp_fixed_start(g)?;
        // Rotation moves vertex 0 to any of the n positions bijectively.
        (BigUint::from(fixed) * BigUint::from(n as u64), nodes, "subset-dp")
    } else {
        let mut leaves: u128 = 0;
        let nodes = block_backtrack(g, ell, &mut |_| {
            leaves = leaves
                .checked_add(1)
                .ok_or_else(|| Error::ResourceLimit("sequence count overflows u128".into()))?;
            Ok(())
        })?;
        let m = n / shape.step;
        let restored = BigUint::from(leaves)
            * BigUint::from(m as u64)
            * BigUint::from(shape.lambda).pow(m as u32);
        (restored, nodes, "backtracking")
    };
    let aut = cycle_aut(n, g.r(), ell)?;
    let count = exact_div(sequences_total, aut, "Z = sequences / |Aut(C)|")?;
    Ok(CountOutcome { count, method: method_name, nodes, elapsed: start.elapsed() })
}

/// Enumerate the Hamilton l-cycle copies of `g` as sorted edge-rank
/// signatures, ascending. Fails if more than `cap` distinct copies appear.
pub fn enumerate_hamilton(g: &Hypergraph, ell: usize, cap: usize) -> Result<Vec<Vec<u64>>> {
    let shape = derive_constants(g.r(), ell)?;
    if g.n() % shape.step != 0 || g.n() < g.r() + shape.step {
        return Err(Error::InvalidParams(format!(
            "no Hamilton l-cycle exists on n={} for r={}, l={ell}",
            g.n(),
            g.r()
        )));
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    block_backtrack(g, ell, &mut |seq| {
        let copy = CycleCopy::from_sequence(seq.to_vec(), g.r(), ell)?;
        seen.insert(copy.sorted_ranks());
        if seen.len() > cap {
            return Err(Error::ResourceLimit(format!("more than {cap} cycle copies")));
        }
        Ok(())
    })?;
    let mut out: Vec<Vec<u64>> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Count copies of the k-edge path pattern in `g`: injective position
/// assignments with every window an edge, divided by |Aut(P_k)|.
pub fn count_path_copies(g: &Hypergraph, ell: usize, k: usize) -> Result<BigUint> {
    let pat = PathPattern::new(g.r(), ell, k)?;
    if pat.v > g.n() {
        return Ok(BigUint::zero());
    }
    let embeddings = path_embeddings(g, &pat)?;
    let aut = BigUint::from(path_aut(g.r(), ell, k)?);
    exact_div(BigUint::from(embeddings), aut, "N_P(G) = embeddings / |Aut(P)|")
}

fn pack_ordered(vs: &[u16]) -> u64 {
    debug_assert!(vs.iter().all(|&v| v < 32));
    vs.iter().fold(0u64, |acc, &v| (acc << 5) | v as u64)
}

fn unpack_ordered(packed: u64, out: &mut [u16]) {
    let k = out.len();
    for i in 0..k {
        out[k - 1 - i] = ((packed >> (5 * i)) & 31) as u16;
    }
}

/// Extension index for tight windows: rank of a sorted (r-1)-subset to the
/// vertices completing it to an edge.
fn build_ext_index(g: &Hypergraph) -> HashMap<u64, Vec<u16>> {
    let mut ext: HashMap<u64, Vec<u16>> = HashMap::new();
    let r = g.r();
    let mut rest = Vec::with_capacity(r - 1);
    for idx in 0..g.edge_count() {
        let verts = g.edge_verts(idx);
        for drop in 0..r {
            rest.clear();
            rest.extend(verts.iter().enumerate().filter(|&(j, _)| j != drop).map(|(_, &v)| v));
            ext.entry(rank_of(&rest)).or_default().push(verts[drop]);
        }
    }
    ext
}

/// Sequences (v_0, ..., v_{n-1}) with v_0 = 0 whose n tight windows all lie
/// in `g`, via the layered subset DP. Returns (count, transition nodes).
fn tight_dp_fixed_start(g: &Hypergraph) -> Result<(u128, u64)> {
    let n = g.n();
    let r = g.r();
    let ext = build_ext_index(g);
    let mut nodes: u64 = 0;

    // Group the window-0 seeds by the first r-2 positions after vertex 0;
    // those positions take part in the wraparound windows, so each group
    // runs its own DP.
    let mut groups: HashMap<Vec<u16>, Vec<(u32, Vec<u16>)>> = HashMap::new();
    for idx in 0..g.edge_count() {
        let verts = g.edge_verts(idx);
        if verts[0] != 0 {
            // Edges are sorted, so vertex 0 is present iff it comes first.
            continue;
        }
        let others: Vec<u16> = verts[1..].to_vec();
        permutations(&others, &mut |perm| {
            let prefix = perm[..r - 2].to_vec();
            let mask = perm.iter().fold(1u32, |m, &v| m | 1 << v);
            groups.entry(prefix).or_default().push((mask, perm.to_vec()));
        });
    }

    let mut total: u128 = 0;
    let full_mask: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut scratch_sorted = vec![0u16; r - 1];
    let mut scratch_last = vec![0u16; r - 1];
    for (prefix, seeds) in groups {
        // States after placing positions 0..=p: (visited mask, ordered last
        // r-1 vertices). Seeds are the states at p = r-1.
        let mut layer: HashMap<(u32, u64), u128> = HashMap::new();
        for (mask, last) in seeds {
            *layer.entry((mask, pack_ordered(&last))).or_insert(0) += 1;
        }
        for _pos in r..n {
            let mut next: HashMap<(u32, u64), u128> = HashMap::new();
            for (&(mask, packed), &ways) in &layer {
                unpack_ordered(packed, &mut scratch_last);
                scratch_sorted.copy_from_slice(&scratch_last);
                scratch_sorted.sort_unstable();
                let Some(cands) = ext.get(&rank_of(&scratch_sorted)) else { continue };
                for &w in cands {
                    nodes += 1;
                    if nodes > NODE_LIMIT {
                        return Err(Error::ResourceLimit("subset DP exceeded node limit".into()));
                    }
                    if mask >> w & 1 == 1 {
                        continue;
                    }
                    let shifted = ((packed << 5) | w as u64) & ((1u64 << (5 * (r - 1))) - 1);
                    *next.entry((mask | 1 << w, shifted)).or_insert(0) += ways;
                }
            }
            layer = next;
        }
        // Full layer: the r-1 wraparound windows are still unchecked.
        // Window n-r+1+i consists of the tail v_{n-r+1+i}..v_{n-1} and the
        // head v_0..v_i, with the head fixed by this group.
        let mut head = vec![0u16];
        head.extend_from_slice(&prefix);
        for (&(mask, packed), &ways) in &layer {
            if mask != full_mask {
                continue;
            }
            unpack_ordered(packed, &mut scratch_last);
            let mut ok = true;
            for i in 0..r - 1 {
                let mut win: Vec<u16> = scratch_last[i..].to_vec();
                win.extend_from_slice(&head[..i + 1]);
                win.sort_unstable();
                if !g.contains_sorted(&win) {
                    ok = false;
                    break;
                }
            }
            if ok {
                total = total
                    .checked_add(ways)
                    .ok_or_else(|| Error::ResourceLimit("sequence count overflows u128".into()))?;
            }
        }
    }
    Ok((total, nodes))
}

fn permutations(items: &[u16], visit: &mut impl FnMut(&[u16])) {
    let mut buf = items.to_vec();
    permute_rec(&mut buf, 0, visit);
}

fn permute_rec(buf: &mut [u16], start: usize, visit: &mut impl FnMut(&[u16])) {
    if start == buf.len() {
        visit(buf);
        return;
    }
    for i in start..buf.len() {
        buf.swap(start, i);
        permute_rec(buf, start + 1, visit);
        buf.swap(start, i);
    }
}

/// Completion index for block placement: sorted (r-t)-subset rank to the
/// sorted t-sets that finish an edge, with vertex masks.
type Completions = HashMap<u64, Vec<(Vec<u16>, u128)>>;

struct BlockCtx<'a> {
    g: &'a Hypergraph,
    n: usize,
    s: usize,
    t: usize,
    m: usize,
    q: usize,
    seq: Vec<u16>,
    used: u128,
    nodes: u64,
}

impl BlockCtx<'_> {
    fn bump(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_LIMIT {
            return Err(Error::ResourceLimit("backtracking exceeded node limit".into()));
        }
        Ok(())
    }
}

type LeafFn<'a> = dyn FnMut(&[u16]) -> Result<()> + 'a;

/// Backtrack over canonical block sequences; calls `on_leaf` with each
/// completed sequence. Returns the number of placement attempts.
fn block_backtrack(g: &Hypergraph, ell: usize, on_leaf: &mut LeafFn) -> Result<u64> {
    let shape = derive_constants(g.r(), ell)?;
    let n = g.n();
    let r = g.r();
    let (s, t) = (shape.step, shape.offset);
    let m = n / s;
    let q = (r - t) / s;
    debug_assert!(q >= 1 && q < m);

    let mut completions: Completions = HashMap::new();
    for idx in 0..g.edge_count() {
        let verts = g.edge_verts(idx);
        for tset in combinations(r, t) {
            let chosen: Vec<u16> = tset.iter().map(|&j| verts[j]).collect();
            let rest: Vec<u16> = (0..r).filter(|j| !tset.contains(j)).map(|j| verts[j]).collect();
            let mask = chosen.iter().fold(0u128, |mm, &v| mm | 1 << v);
            completions.entry(rank_of(&rest)).or_default().push((chosen, mask));
        }
    }

    let mut ctx = BlockCtx {
        g,
        n,
        s,
        t,
        m,
        q,
        seq: Vec::with_capacity(n),
        used: 0,
        nodes: 0,
    };
    place_block(&mut ctx, &completions, 0, on_leaf)?;
    Ok(ctx.nodes)
}

fn place_block(ctx: &mut BlockCtx, comp: &Completions, b: usize, on_leaf: &mut LeafFn) -> Result<()> {
    if b == ctx.m {
        // All blocks placed; the last q windows wrap and are unchecked.
        for i in ctx.m - ctx.q..ctx.m {
            let mut win: Vec<u16> =
                (0..ctx.g.r()).map(|j| ctx.seq[(i * ctx.s + j) % ctx.n]).collect();
            win.sort_unstable();
            if !ctx.g.contains_sorted(&win) {
                return Ok(());
            }
        }
        return on_leaf(&ctx.seq);
    }
    let base = b * ctx.s;
    if b >= ctx.q {
        // The leading t vertices of block b complete window b-q, whose
        // other r-t vertices are already placed.
        let wstart = (b - ctx.q) * ctx.s;
        let mut known: Vec<u16> = ctx.seq[wstart..base].to_vec();
        known.sort_unstable();
        let Some(cands) = comp.get(&rank_of(&known)) else { return Ok(()) };
        for (chosen, cmask) in cands {
            ctx.bump()?;
            if cmask & ctx.used != 0 {
                continue;
            }
            ctx.seq.extend_from_slice(chosen);
            ctx.used |= cmask;
            place_trailing(ctx, comp, b, ctx.s - ctx.t, 0, on_leaf)?;
            ctx.used &= !cmask;
            ctx.seq.truncate(base);
        }
    } else {
        // Early block: no window completes yet; any ascending t-tuple of
        // unused vertices can lead.
        leading_tuples(ctx, comp, b, 0, ctx.t, on_leaf)?;
    }
    Ok(())
}

fn leading_tuples(
    ctx: &mut BlockCtx,
    comp: &Completions,
    b: usize,
    min_v: u16,
    left: usize,
    on_leaf: &mut LeafFn,
) -> Result<()> {
    if left == 0 {
        return place_trailing(ctx, comp, b, ctx.s - ctx.t, 0, on_leaf);
    }
    for v in min_v..ctx.n as u16 {
        if ctx.used >> v & 1 == 1 {
            continue;
        }
        ctx.bump()?;
        ctx.seq.push(v);
        ctx.used |= 1 << v;
        leading_tuples(ctx, comp, b, v + 1, left - 1, on_leaf)?;
        ctx.used &= !(1u128 << v);
        ctx.seq.pop();
    }
    Ok(())
}

fn place_trailing(
    ctx: &mut BlockCtx,
    comp: &Completions,
    b: usize,
    left: usize,
    min_v: u16,
    on_leaf: &mut LeafFn,
) -> Result<()> {
    if left == 0 {
        // Rotation canonicalization: vertex 0 must sit in block 0.
        if b == 0 && ctx.used & 1 == 0 {
            return Ok(());
        }
        return place_block(ctx, comp, b + 1, on_leaf);
    }
    for v in min_v..ctx.n as u16 {
        if ctx.used >> v & 1 == 1 {
            continue;
        }
        ctx.bump()?;
        ctx.seq.push(v);
        ctx.used |= 1 << v;
        place_trailing(ctx, comp, b, left - 1, v + 1, on_leaf)?;
        ctx.used &= !(1u128 << v);
        ctx.seq.pop();
    }
    Ok(())
}

/// Sorted t-element index subsets of {0, ..., r-1}.
fn combinations(r: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(r: usize, t: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            rec(r, t, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(r, t, 0, &mut cur, &mut out);
    out
}

struct PathCtx<'a> {
    g: &'a Hypergraph,
    v: usize,
    r: usize,
    s: usize,
    assign: Vec<u16>,
    used: u128,
    count: u128,
    nodes: u64,
}

/// Injective assignments of path positions to vertices with all windows in
/// the graph. Window 0 is seeded from the edge list; later positions are
/// filled left to right, consulting the extension index whenever a
/// position closes a window and ranging over unused vertices otherwise.
fn path_embeddings(g: &Hypergraph, pat: &PathPattern) -> Result<u128> {
    let r = g.r();
    let shape = derive_constants(r, pat.ell)?;
    let ext = build_ext_index(g);

    fn rec(ctx: &mut PathCtx, ext: &HashMap<u64, Vec<u16>>, pos: usize) -> Result<()> {
        if pos == ctx.v {
            ctx.count = ctx
                .count
                .checked_add(1)
                .ok_or_else(|| Error::ResourceLimit("embedding count overflows u128".into()))?;
            return Ok(());
        }
        let closes_window = (pos + 1 - ctx.r) % ctx.s == 0;
        if closes_window {
            let wstart = pos + 1 - ctx.r;
            let mut known: Vec<u16> = ctx.assign[wstart..pos].to_vec();
            known.sort_unstable();
            let Some(cands) = ext.get(&rank_of(&known)) else { return Ok(()) };
            for &w in cands {
                ctx.nodes += 1;
                if ctx.nodes > NODE_LIMIT {
                    return Err(Error::ResourceLimit("path search exceeded node limit".into()));
                }
                if ctx.used >> w & 1 == 1 {
                    continue;
                }
                ctx.assign.push(w);
                ctx.used |= 1 << w;
                rec(ctx, ext, pos + 1)?;
                ctx.used &= !(1u128 << w);
                ctx.assign.pop();
            }
        } else {
            for w in 0..ctx.g.n() as u16 {
                if ctx.used >> w & 1 == 1 {
                    continue;
                }
                ctx.nodes += 1;
                ctx.assign.push(w);
                ctx.used |= 1 << w;
                rec(ctx, ext, pos + 1)?;
                ctx.used &= !(1u128 << w);
                ctx.assign.pop();
            }
        }
        Ok(())
    }

    let mut ctx = PathCtx {
        g,
        v: pat.v,
        r,
        s: shape.step,
        assign: Vec::with_capacity(pat.v),
        used: 0,
        count: 0,
        nodes: 0,
    };
    // Window 0 occupies positions 0..r: seed directly from the edges.
    let mut perms: Vec<Vec<u16>> = Vec::new();
    for idx in 0..g.edge_count() {
        let verts: Vec<u16> = g.edge_verts(idx).to_vec();
        let mask = g.edge_mask(idx);
        perms.clear();
        permutations(&verts, &mut |perm| perms.push(perm.to_vec()));
        for perm in &perms {
            ctx.assign.clear();
            ctx.assign.extend_from_slice(perm);
            ctx.used = mask;
            rec(&mut ctx, &ext, r)?;
        }
    }
    Ok(ctx.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aut::cycle_copies;
    use crate::rng::{threshold_u64, Seed};

    fn random_graph(n: usize, r: usize, p: f64, seed: u64) -> Hypergraph {
        let space = crate::binom::binomial_u64(n as u64, r as u64).unwrap();
        let thr = threshold_u64(p);
        let ranks: Vec<u64> = (0..space)
            .filter(|&rk| crate::rng::draw_u64(Seed::new(seed, 0), 0, rk) < thr)
            .collect();
        Hypergraph::from_ranks(n, r, ranks).unwrap()
    }

    #[test]
    fn complete_graph_counts_match_copy_formula_tight() {
        for n in [5usize, 6, 7] {
            let g = Hypergraph::complete(n, 3).unwrap();
            let want = cycle_copies(n, 3, 2).unwrap();
            let dp = count_hamilton(&g, 2, CountMethod::SubsetDp).unwrap();
            let bt = count_hamilton(&g, 2, CountMethod::Backtracking).unwrap();
            assert_eq!(dp.count, want, "dp n={n}");
            assert_eq!(bt.count, want, "bt n={n}");
        }
    }

    #[test]
    fn complete_graph_counts_match_copy_formula_loose() {
        // r=4, l=2 on n=8: 8! / (2 * 4 * 2^4) = 315.
        let g = Hypergraph::complete(8, 4).unwrap();
        let got = count_hamilton(&g, 2, CountMethod::Auto).unwrap();
        assert_eq!(got.count, BigUint::from(315u32));
        assert_eq!(got.method, "backtracking");
        assert_eq!(got.count, cycle_copies(8, 4, 2).unwrap());

        // r=5, l=2 on n=9.
        let g = Hypergraph::complete(9, 5).unwrap();
        let got = count_hamilton(&g, 2, CountMethod::Auto).unwrap();
        assert_eq!(got.count, cycle_copies(9, 5, 2).unwrap());

        // r=4, l=3 (tight, s=1) on n=7 via both kernels.
        let g = Hypergraph::complete(7, 4).unwrap();
        let want = cycle_copies(7, 4, 3).unwrap();
        assert_eq!(count_hamilton(&g, 3, CountMethod::SubsetDp).unwrap().count, want);
        assert_eq!(count_hamilton(&g, 3, CountMethod::Backtracking).unwrap().count, want);
    }

    #[test]
    fn degenerate_complete_n4_counts_one_copy() {
        let g = Hypergraph::complete(4, 3).unwrap();
        for method in [CountMethod::SubsetDp, CountMethod::Backtracking] {
            let got = count_hamilton(&g, 2, method).unwrap();
            assert_eq!(got.count, BigUint::from(1u32));
        }
    }

    #[test]
    fn planted_cycle_alone_counts_once() {
        for (n, r, ell) in [(7, 3, 2), (12, 4, 2), (12, 4, 3), (12, 5, 2)] {
            let c = CycleCopy::canonical(n, r, ell).unwrap();
            let g = Hypergraph::from_ranks(n, r, c.sorted_ranks()).unwrap();
            let got = count_hamilton(&g, ell, CountMethod::Auto).unwrap();
            assert_eq!(got.count, BigUint::from(1u32), "n={n} r={r} l={ell}");
        }
    }

    #[test]
    fn dp_and_backtracking_agree_on_random_tight_graphs() {
        for seed in 0..12u64 {
            let g = random_graph(10, 3, 0.28, seed);
            let dp = count_hamilton(&g, 2, CountMethod::SubsetDp).unwrap();
            let bt = count_hamilton(&g, 2, CountMethod::Backtracking).unwrap();
            assert_eq!(dp.count, bt.count, "seed {seed}");
        }
    }

    #[test]
    fn enumerate_agrees_with_count_and_is_sorted() {
        for seed in 0..8u64 {
            let g = random_graph(9, 3, 0.35, seed);
            let copies = enumerate_hamilton(&g, 2, 100_000).unwrap();
            let z = count_hamilton(&g, 2, CountMethod::Auto).unwrap().count;
            assert_eq!(BigUint::from(copies.len() as u64), z, "seed {seed}");
            for w in copies.windows(2) {
                assert!(w[0] < w[1]);
            }
            for sig in &copies {
                assert!(sig.iter().all(|rk| g.contains_rank(*rk)));
            }
        }
    }

    #[test]
    fn enumerate_cap_enforced() {
        let g = Hypergraph::complete(7, 3).unwrap();
        assert!(enumerate_hamilton(&g, 2, 10).is_err());
        assert_eq!(enumerate_hamilton(&g, 2, 360).unwrap().len(), 360);
    }

    #[test]
    fn path_count_on_complete_graphs_matches_formula() {
        let g = Hypergraph::complete(4, 3).unwrap();
        assert_eq!(count_path_copies(&g, 2, 2).unwrap(), BigUint::from(6u32));
        let g = Hypergraph::complete(6, 3).unwrap();
        for k in 1..=4 {
            assert_eq!(
                count_path_copies(&g, 2, k).unwrap(),
                crate::aut::path_copies(6, 3, 2, k).unwrap(),
                "k={k}"
            );
        }
        let g = Hypergraph::complete(8, 4).unwrap();
        for (ell, k) in [(2usize, 2usize), (3, 2), (3, 3)] {
            assert_eq!(
                count_path_copies(&g, ell, k).unwrap(),
                crate::aut::path_copies(8, 4, ell, k).unwrap(),
                "l={ell} k={k}"
            );
        }
    }

    #[test]
    fn path_count_in_lone_cycle_is_edge_count_for_short_paths() {
        // In a bare l-cycle each P_2 copy is a pair of consecutive windows.
        let c = CycleCopy::canonical(6, 3, 2).unwrap();
        let g = Hypergraph::from_ranks(6, 3, c.sorted_ranks()).unwrap();
        assert_eq!(count_path_copies(&g, 2, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(count_path_copies(&g, 2, 2).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn path_count_does_not_fit_gives_zero() {
        let g = Hypergraph::complete(5, 3).unwrap();
        assert_eq!(count_path_copies(&g, 2, 4).unwrap(), BigUint::zero());
    }

    #[test]
    fn empty_graph_has_no_cycles() {
        let g = Hypergraph::from_ranks(8, 3, vec![]).unwrap();
        assert_eq!(count_hamilton(&g, 2, CountMethod::Auto).unwrap().count, BigUint::zero());
        assert!(enumerate_hamilton(&g, 2, 10).unwrap().is_empty());
    }

    #[test]
    fn method_restrictions_enforced() {
        let g = Hypergraph::complete(8, 4).unwrap();
        assert!(count_hamilton(&g, 2, CountMethod::SubsetDp).is_err()); // s=2
        let g = Hypergraph::complete(5, 3).unwrap();
        assert!(count_hamilton(&g, 1, CountMethod::Auto).is_err()); // s=2, 5 odd
    }
}
