//! Automorphism counts for cycle and path patterns, and the copy counts
//! they determine.
//!
//! The automorphism group of a Hamilton l-cycle is conjectured to be
//! generated by rotation, reflection, and the independent within-block
//! symmetries, giving |Aut| = 2 m lambda^m. This is provably not an
//! identity for every n: at n = 4, r = 3, l = 2 the cycle's edge set is the
//! complete 3-graph on 4 vertices, whose automorphism group is all of S_4
//! (order 24, not 8). The closed form is therefore never trusted blindly.
//! For small n we brute force. For large n we first validate the closed
//! form by brute force on the largest few feasible n that the brute forcer
//! can handle, and refuse to proceed on any mismatch.
//!
//! Path automorphism counts enter the limit law through the normalized
//! sequence A_k = |Aut(P_k)| / lambda^k, which stabilizes once the path is
//! long enough that end effects cannot reach each other. Stabilization is
//! detected empirically (three consecutive equal values) rather than
//! assumed.

use std::collections::{HashMap, HashSet};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::binom::{factorial_big, falling_big};
use crate::error::{Error, Result};
use crate::params::derive_constants;
use crate::pattern::{CycleCopy, PathPattern};

/// Largest vertex count the brute forcer accepts by default. Chosen so the
/// validation grid below stays sub-second.
pub const AUT_BRUTE_CAP: usize = 14;

const AUT_NODE_LIMIT: u64 = 2_000_000_000;

/// Count automorphisms of the hypergraph on vertices 0..v-1 with the given
/// edge list, by backtracking over vertex images.
///
/// Candidates are pruned by degree, and every edge that becomes fully
/// mapped is checked against the edge set immediately. Vertices are
/// processed in a connectivity-greedy order so that checks fire as early
/// as possible.
pub fn aut_bruteforce(v: usize, edges: &[Vec<u16>]) -> Result<u64> {
    if v > 32 {
        return Err(Error::ResourceLimit(format!(
            "automorphism brute force supports at most 32 vertices, got {v}"
        )));
    }
    let masks: Vec<u32> = edges
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &x| m | 1 << x))
        .collect();
    let edge_set: HashSet<u32> = masks.iter().copied().collect();
    if edge_set.len() != masks.len() {
        return Err(Error::InvalidParams("duplicate edge in automorphism input".into()));
    }
    let mut deg = vec![0u32; v];
    for e in edges {
        for &x in e {
            deg[x as usize] += 1;
        }
    }

    // Static vertex order: repeatedly take the vertex sharing the most
    // edges with what is already placed (ties to the lower label).
    let mut order: Vec<usize> = Vec::with_capacity(v);
    let mut placed_mask = 0u32;
    for _ in 0..v {
        let mut best = usize::MAX;
        let mut best_score = -1i64;
        for u in 0..v {
            if placed_mask >> u & 1 == 1 {
                continue;
            }
            let score: i64 = masks
                .iter()
                .filter(|&&m| m >> u & 1 == 1 && (m & placed_mask) != 0)
                .count() as i64;
            if score > best_score {
                best_score = score;
                best = u;
            }
        }
        order.push(best);
        placed_mask |= 1 << best;
    }

    // For each step, the edges that become fully mapped once order[step]
    // receives an image.
    let mut step_of = vec![0usize; v];
    for (step, &u) in order.iter().enumerate() {
        step_of[u] = step;
    }
    let mut check_at: Vec<Vec<usize>> = vec![Vec::new(); v];
    for (ei, e) in edges.iter().enumerate() {
        let last = e.iter().map(|&x| step_of[x as usize]).max().unwrap();
        check_at[last].push(ei);
    }

    struct State<'a> {
        order: &'a [usize],
        check_at: &'a [Vec<usize>],
        edges: &'a [Vec<u16>],
        edge_set: &'a HashSet<u32>,
        deg: &'a [u32],
        img: Vec<u32>,
        used: u32,
        nodes: u64,
        count: u64,
    }

    fn recurse(st: &mut State, step: usize) -> Result<()> {
        if step == st.order.len() {
            st.count += 1;
            return Ok(());
        }
        let u = st.order[step];
        for w in 0..st.order.len() as u32 {
            if st.used >> w & 1 == 1 || st.deg[w as usize] != st.deg[u] {
                continue;
            }
            st.nodes += 1;
            if st.nodes > AUT_NODE_LIMIT {
                return Err(Error::ResourceLimit("automorphism search too large".into()));
            }
            st.img[u] = w;
            let ok = st.check_at[step].iter().all(|&ei| {
                let m = st.edges[ei].iter().fold(0u32, |m, &x| m | 1 << st.img[x as usize]);
                st.edge_set.contains(&m)
            });
            if ok {
                st.used |= 1 << w;
                recurse(st, step + 1)?;
                st.used &= !(1 << w);
            }
        }
        Ok(())
    }

    let mut st = State {
        order: &order,
        check_at: &check_at,
        edges,
        edge_set: &edge_set,
        deg: &deg,
        img: vec![0; v],
        used: 0,
        nodes: 0,
        count: 0,
    };
    recurse(&mut st, 0)?;
    Ok(st.count)
}

/// |Aut| of the path pattern with k edges, by brute force.
pub fn path_aut(r: usize, ell: usize, k: usize) -> Result<u64> {
    let p = PathPattern::new(r, ell, k)?;
    if p.v > AUT_BRUTE_CAP {
        return Err(Error::ResourceLimit(format!(
            "path with k={k} edges has {} vertices, brute force cap is {AUT_BRUTE_CAP}",
            p.v
        )));
    }
    aut_bruteforce(p.v, &p.as_edges())
}

/// The normalized path symmetry sequence A_k = |Aut(P_k)| / lambda^k.
#[derive(Debug, Clone)]
pub struct ATable {
    pub r: usize,
    pub ell: usize,
    /// values[i] is A_{i+1}, exact from brute force.
    pub values: Vec<u64>,
    /// Smallest k from which all computed values agree, provided the
    /// stable run has length >= 3; None if no such run was observed.
    pub k_stab: Option<usize>,
}

impl ATable {
    /// A_k, extrapolating past the computed range only after stabilization.
    pub fn a(&self, k: usize) -> Result<u64> {
        if k == 0 {
            return Err(Error::InvalidParams("A_k is defined for k >= 1".into()));
        }
        if k <= self.values.len() {
            return Ok(self.values[k - 1]);
        }
        self.a_stab().map_err(|_| {
            Error::ResourceLimit(format!(
                "A_{k} is beyond the brute-forced range {} and the sequence has not stabilized",
                self.values.len()
            ))
        })
    }

    /// The stable value, if stabilization was observed.
    pub fn a_stab(&self) -> Result<u64> {
        match self.k_stab {
            Some(k) => Ok(self.values[k - 1]),
            None => Err(Error::ResourceLimit(format!(
                "A_k for r={} l={} shows no stable run of length 3 within brute-force range",
                self.r, self.ell
            ))),
        }
    }
}

/// Brute force A_1 .. A_k0 where k0 = min(k_max, largest k with
/// l + k s <= AUT_BRUTE_CAP), checking the lambda^k divisibility exactly.
pub fn compute_a_table(r: usize, ell: usize, k_max: usize) -> Result<ATable> {
    let shape = derive_constants(r, ell)?;
    let mut values = Vec::new();
    for k in 1..=k_max {
        if ell + k * shape.step > AUT_BRUTE_CAP {
            break;
        }
        let aut = path_aut(r, ell, k)?;
        let denom = (shape.lambda as u128).pow(k as u32);
        let aut128 = aut as u128;
        if aut128 % denom != 0 {
            return Err(Error::InexactDivision {
                context: "A_k = |Aut(P_k)| / lambda^k",
                dividend: aut.to_string(),
                divisor: denom.to_string(),
            });
        }
        values.push((aut128 / denom) as u64);
    }
    if values.is_empty() {
        return Err(Error::ResourceLimit(format!(
            "no path of shape r={r}, l={ell} fits under the brute-force cap"
        )));
    }
    let last = *values.last().unwrap();
    let mut k_stab = None;
    if values.len() >= 3 {
        let run_start = values
            .iter()
            .rposition(|&a| a != last)
            .map(|i| i + 1)
            .unwrap_or(0);
        if values.len() - run_start >= 3 {
            k_stab = Some(run_start + 1);
        }
    }
    Ok(ATable { r, ell, values, k_stab })
}

/// |Aut| of the Hamilton l-cycle on n vertices, exact.
///
/// Small n is brute forced outright. Larger n uses the closed form
/// 2 m lambda^m, but only after it has been validated by brute force on
/// the largest (up to three) feasible vertex counts under the cap; a
/// validated (r, l) is cached for the process lifetime.
pub fn cycle_aut(n: usize, r: usize, ell: usize) -> Result<BigUint> {
    let shape = derive_constants(r, ell)?;
    if n % shape.step != 0 || n < r + shape.step {
        return Err(Error::InvalidParams(format!(
            "no Hamilton l-cycle on n={n} vertices for r={r}, l={ell}"
        )));
    }
    if n <= AUT_BRUTE_CAP {
        let c = CycleCopy::canonical(n, r, ell)?;
        let edges: Vec<Vec<u16>> = c.windows.clone();
        return Ok(BigUint::from(aut_bruteforce(n, &edges)?));
    }
    validate_cycle_closed_form(r, ell)?;
    Ok(cycle_aut_closed_form(n, r, ell))
}

fn cycle_aut_closed_form(n: usize, r: usize, ell: usize) -> BigUint {
    let shape = derive_constants(r, ell).expect("validated by caller");
    let m = n / shape.step;
    BigUint::from(2u32) * BigUint::from(m) * BigUint::from(shape.lambda).pow(m as u32)
}

/// The vertex counts used to validate the closed form for (r, l): the
/// largest feasible grid points under the brute-force cap, at most three.
pub fn validation_grid(r: usize, ell: usize) -> Result<Vec<usize>> {
    let shape = derive_constants(r, ell)?;
    let grid: Vec<usize> = (r + shape.step..=AUT_BRUTE_CAP)
        .rev()
        .filter(|n| n % shape.step == 0)
        .take(3)
        .collect();
    if grid.is_empty() {
        return Err(Error::ResourceLimit(format!(
            "no feasible cycle under the brute-force cap for r={r}, l={ell}"
        )));
    }
    Ok(grid)
}

fn validate_cycle_closed_form(r: usize, ell: usize) -> Result<()> {
    static VALIDATED: OnceLock<Mutex<HashMap<(usize, usize), ()>>> = OnceLock::new();
    let cache = VALIDATED.get_or_init(|| Mutex::new(HashMap::new()));
    if cache.lock().unwrap().contains_key(&(r, ell)) {
        return Ok(());
    }
    for n in validation_grid(r, ell)? {
        let c = CycleCopy::canonical(n, r, ell)?;
        let brute = BigUint::from(aut_bruteforce(n, &c.windows)?);
        let closed = cycle_aut_closed_form(n, r, ell);
        if brute != closed {
            return Err(Error::ClosedFormMismatch {
                n,
                brute: brute.to_string(),
                closed: closed.to_string(),
            });
        }
    }
    cache.lock().unwrap().insert((r, ell), ());
    Ok(())
}

/// Number of Hamilton l-cycle copies in the complete r-graph on n
/// vertices: n! / |Aut|, with the divisibility checked.
pub fn cycle_copies(n: usize, r: usize, ell: usize) -> Result<BigUint> {
    let aut = cycle_aut(n, r, ell)?;
    exact_div(factorial_big(n as u64), aut, "N_C = n! / |Aut(C)|")
}

/// Number of path copies with k edges in the complete r-graph on n
/// vertices: (n)_v / |Aut(P_k)|. Zero when the path does not fit.
pub fn path_copies(n: usize, r: usize, ell: usize, k: usize) -> Result<BigUint> {
    let p = PathPattern::new(r, ell, k)?;
    if p.v > n {
        return Ok(BigUint::zero());
    }
    let aut = BigUint::from(path_aut(r, ell, k)?);
    exact_div(falling_big(n as u64, p.v as u64), aut, "N_P = (n)_v / |Aut(P)|")
}

/// `path_copies` as f64 for formula work; None on overflow of f64 range.
pub fn path_copies_f64(n: usize, r: usize, ell: usize, k: usize) -> Result<f64> {
    let copies = path_copies(n, r, ell, k)?;
    copies
        .to_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Numeric("path copy count exceeds f64 range".into()))
}

pub(crate) fn exact_div(num: BigUint, den: BigUint, context: &'static str) -> Result<BigUint> {
    let (q, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::InexactDivision {
            context,
            dividend: num.to_string(),
            divisor: den.to_string(),
        });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn one() -> BigUint {
        BigUint::one()
    }

    #[test]
    fn aut_of_single_edge_is_full_symmetric_group() {
        assert_eq!(aut_bruteforce(3, &[vec![0, 1, 2]]).unwrap(), 6);
        assert_eq!(aut_bruteforce(4, &[vec![0, 1, 2, 3]]).unwrap(), 24);
        // An isolated vertex multiplies by its own permutations.
        assert_eq!(aut_bruteforce(4, &[vec![0, 1, 2]]).unwrap(), 6);
    }

    #[test]
    fn tight_cycle_aut_is_dihedral_times_blocks() {
        // For r=3, l=2, n >= 5 the group is the dihedral group of order 2n.
        for n in [5usize, 6, 7, 8] {
            assert_eq!(cycle_aut(n, 3, 2).unwrap(), BigUint::from(2 * n), "n={n}");
        }
    }

    #[test]
    fn degenerate_small_cycle_is_why_validation_exists() {
        // At n=4 the tight 3-cycle's edges are all of C(4,3): the complete
        // 3-graph, with automorphism group S_4. The closed form would say 8.
        assert_eq!(cycle_aut(4, 3, 2).unwrap(), BigUint::from(24u32));
    }

    #[test]
    fn loose_cycle_aut_closed_form_validates_and_applies() {
        // r=4, l=2: s=2, lambda=2; closed form 2 m 2^m.
        let got = cycle_aut(20, 4, 2).unwrap();
        assert_eq!(got, BigUint::from(2u32 * 10) * BigUint::from(2u32).pow(10));
        // r=5, l=2: s=3, lambda=2.
        let got = cycle_aut(18, 5, 2).unwrap();
        assert_eq!(got, BigUint::from(2u32 * 6) * BigUint::from(2u32).pow(6));
    }

    #[test]
    fn validation_grid_is_largest_feasible() {
        assert_eq!(validation_grid(3, 2).unwrap(), vec![14, 13, 12]);
        assert_eq!(validation_grid(4, 2).unwrap(), vec![14, 12, 10]);
        assert_eq!(validation_grid(5, 2).unwrap(), vec![12, 9]);
        assert_eq!(validation_grid(7, 3).unwrap(), vec![12]);
    }

    #[test]
    fn path_aut_hand_values_tight_3() {
        // P_1 is one edge (S_3), P_2 has the end swap and the middle swap,
        // P_3 and longer have only identity and reversal.
        assert_eq!(path_aut(3, 2, 1).unwrap(), 6);
        assert_eq!(path_aut(3, 2, 2).unwrap(), 4);
        assert_eq!(path_aut(3, 2, 3).unwrap(), 2);
        assert_eq!(path_aut(3, 2, 4).unwrap(), 2);
    }

    #[test]
    fn a_table_tight_3_stabilizes_at_3() {
        let t = compute_a_table(3, 2, 8).unwrap();
        assert_eq!(&t.values[..5], &[6, 4, 2, 2, 2]);
        assert_eq!(t.k_stab, Some(3));
        assert_eq!(t.a_stab().unwrap(), 2);
        assert_eq!(t.a(30).unwrap(), 2);
    }

    #[test]
    fn a_table_tight_4_stabilizes_at_4() {
        // Hand values: A_1=24, A_2=12, A_3=4 (middle swap survives),
        // A_4 and beyond 2.
        let t = compute_a_table(4, 3, 8).unwrap();
        assert_eq!(&t.values[..4], &[24, 12, 4, 2]);
        assert_eq!(t.k_stab, Some(4));
    }

    #[test]
    fn a_table_loose_4_2() {
        // lambda=2: A_1 = 24/2 = 12, A_k = 4 for k >= 2.
        let t = compute_a_table(4, 2, 6).unwrap();
        assert_eq!(&t.values[..4], &[12, 4, 4, 4]);
        assert_eq!(t.k_stab, Some(2));
    }

    #[test]
    fn a_table_without_stable_run_refuses_to_extrapolate() {
        // r=7, l=3: only k=1, 2 fit under the cap.
        let t = compute_a_table(7, 3, 8).unwrap();
        assert!(t.values.len() <= 2);
        assert!(t.k_stab.is_none());
        assert!(t.a(5).is_err());
    }

    #[test]
    fn copy_counts_small_tight_cycles() {
        assert_eq!(cycle_copies(5, 3, 2).unwrap(), BigUint::from(12u32));
        assert_eq!(cycle_copies(6, 3, 2).unwrap(), BigUint::from(60u32));
        assert_eq!(cycle_copies(7, 3, 2).unwrap(), BigUint::from(360u32));
    }

    #[test]
    fn path_copy_counts() {
        // Single edge: C(n, 3).
        assert_eq!(path_copies(5, 3, 2, 1).unwrap(), BigUint::from(10u32));
        // k=2 on 4 vertices: 4! / 4 = 6; on 5: (5)_4 / 4 = 30.
        assert_eq!(path_copies(4, 3, 2, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(path_copies(5, 3, 2, 2).unwrap(), BigUint::from(30u32));
        // Does not fit.
        assert_eq!(path_copies(5, 3, 2, 4).unwrap(), BigUint::zero());
    }

    #[test]
    fn exact_div_guard_trips_on_non_divisor() {
        assert!(exact_div(BigUint::from(10u32), BigUint::from(4u32), "test").is_err());
        assert_eq!(exact_div(BigUint::from(12u32), BigUint::from(4u32), "test").unwrap(), BigUint::from(3u32));
        let _ = one();
    }
}
