//! Hypergraph representation with combinadic edge ranking.
//!
//! Edges are r-subsets of {0, ..., n-1}. Each edge is identified by its
//! colexicographic rank: for sorted vertices v_1 < v_2 < ... < v_r the rank
//! is sum_i C(v_i, i). Ranks enumerate all C(n, r) subsets as 0, 1, ...,
//! which gives every potential edge a stable counter for the keyed RNG and
//! a compact on-disk form.
//!
//! A graph stores its edges three ways at once: sorted rank list (iteration
//! order and serialization), flattened vertex lists (counting kernels), and
//! per-edge vertex bitmasks (u128, hence the global n <= 128 limit). A
//! presence structure answers rank membership in O(1): a plain bitset when
//! the rank space is small enough, a hash set otherwise.

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};

use crate::binom::binomial_u64;
use crate::error::{Error, Result};
use crate::params::MAX_VERTICES;

/// Colexicographic rank of a strictly increasing vertex list.
pub fn rank_of(verts: &[u16]) -> u64 {
    let mut rank = 0u64;
    for (i, &v) in verts.iter().enumerate() {
        rank += binomial_u64(v as u64, i as u64 + 1).expect("rank fits u64");
    }
    rank
}

/// Inverse of `rank_of` for r-subsets of {0, ..., n-1}.
pub fn unrank(n: usize, r: usize, rank: u64) -> Vec<u16> {
    let mut verts = vec![0u16; r];
    let mut rem = rank;
    let mut ceiling = n as u64;
    for i in (1..=r as u64).rev() {
        // Largest v with C(v, i) <= rem; v < ceiling keeps entries distinct.
        let mut v = ceiling - 1;
        let mut c = binomial_u64(v, i).expect("rank fits u64");
        while c > rem {
            v -= 1;
            c = binomial_u64(v, i).expect("rank fits u64");
        }
        rem -= c;
        verts[i as usize - 1] = v as u16;
        ceiling = v;
    }
    verts
}

const BITSET_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone)]
enum Presence {
    Bits(Vec<u64>),
    Set(HashSet<u64>),
}

impl Presence {
    fn with_capacity(rank_space: u64) -> Self {
        if rank_space <= BITSET_LIMIT {
            Presence::Bits(vec![0u64; ((rank_space + 63) / 64) as usize])
        } else {
            Presence::Set(HashSet::new())
        }
    }

    fn insert(&mut self, rank: u64) {
        match self {
            Presence::Bits(words) => words[(rank / 64) as usize] |= 1 << (rank % 64),
            Presence::Set(set) => {
                set.insert(rank);
            }
        }
    }

    fn contains(&self, rank: u64) -> bool {
        match self {
            Presence::Bits(words) => {
                (words[(rank / 64) as usize] >> (rank % 64)) & 1 == 1
            }
            Presence::Set(set) => set.contains(&rank),
        }
    }
}

/// An r-uniform hypergraph on vertex set {0, ..., n-1}.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    ranks: Vec<u64>,
    verts: Vec<u16>,
    masks: Vec<u128>,
    present: Presence,
}

impl Hypergraph {
    /// Build from edge ranks. Ranks are sorted; duplicates and
    /// out-of-range ranks are rejected.
    pub fn from_ranks(n: usize, r: usize, mut ranks: Vec<u64>) -> Result<Self> {
        if n > MAX_VERTICES || r == 0 || r > n {
            return Err(Error::InvalidParams(format!(
                "hypergraph needs 1 <= r <= n <= {MAX_VERTICES}, got n={n} r={r}"
            )));
        }
        let space = binomial_u64(n as u64, r as u64)
            .ok_or_else(|| Error::InvalidParams(format!("C({n}, {r}) does not fit in u64")))?;
        ranks.sort_unstable();
        if ranks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Format("duplicate edge".into()));
        }
        if ranks.last().is_some_and(|&last| last >= space) {
            return Err(Error::Format(format!("edge rank out of range for n={n}, r={r}")));
        }
        let mut verts = Vec::with_capacity(ranks.len() * r);
        let mut masks = Vec::with_capacity(ranks.len());
        let mut present = Presence::with_capacity(space);
        for &rank in &ranks {
            let vs = unrank(n, r, rank);
            let mut mask = 0u128;
            for &v in &vs {
                mask |= 1u128 << v;
            }
            verts.extend_from_slice(&vs);
            masks.push(mask);
            present.insert(rank);
        }
        Ok(Hypergraph { n, r, ranks, verts, masks, present })
    }

    /// Build from explicit vertex lists; each edge must have r distinct
    /// vertices below n (any order).
    pub fn from_edges(n: usize, r: usize, edges: &[Vec<u16>]) -> Result<Self> {
        let mut ranks = Vec::with_capacity(edges.len());
        for edge in edges {
            ranks.push(Self::edge_rank_checked(n, r, edge)?);
        }
        Self::from_ranks(n, r, ranks)
    }

    fn edge_rank_checked(n: usize, r: usize, edge: &[u16]) -> Result<u64> {
        if edge.len() != r {
            return Err(Error::Format(format!("edge has {} vertices, expected {r}", edge.len())));
        }
        let mut sorted = edge.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Format("edge has a repeated vertex".into()));
        }
        if sorted.last().is_some_and(|&v| v as usize >= n) {
            return Err(Error::Format(format!("vertex out of range for n={n}")));
        }
        Ok(rank_of(&sorted))
    }

    /// The complete r-uniform hypergraph on n vertices.
    pub fn complete(n: usize, r: usize) -> Result<Self> {
        let space = binomial_u64(n as u64, r as u64)
            .ok_or_else(|| Error::InvalidParams(format!("C({n}, {r}) does not fit in u64")))?;
        Self::from_ranks(n, r, (0..space).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edge_count(&self) -> usize {
        self.ranks.len()
    }

    /// Total number of potential edges, C(n, r).
    pub fn rank_space(&self) -> u64 {
        binomial_u64(self.n as u64, self.r as u64).expect("validated at construction")
    }

    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn contains_rank(&self, rank: u64) -> bool {
        self.present.contains(rank)
    }

    pub fn contains_sorted(&self, verts: &[u16]) -> bool {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        self.present.contains(rank_of(verts))
    }

    /// Sorted vertex list of edge `idx` (index into `ranks` order).
    pub fn edge_verts(&self, idx: usize) -> &[u16] {
        &self.verts[idx * self.r..(idx + 1) * self.r]
    }

    pub fn edge_mask(&self, idx: usize) -> u128 {
        self.masks[idx]
    }

    pub fn masks(&self) -> &[u128] {
        &self.masks
    }

    /// For each vertex, the indices of edges containing it.
    pub fn vertex_incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.n];
        for (idx, _) in self.ranks.iter().enumerate() {
            for &v in self.edge_verts(idx) {
                inc[v as usize].push(idx as u32);
            }
        }
        inc
    }

    /// Apply a vertex relabeling; `perm[v]` is the new label of `v`.
    pub fn relabel(&self, perm: &[u16]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidParams("permutation length must equal n".into()));
        }
        let mut seen = vec![false; self.n];
        for &img in perm {
            if (img as usize) >= self.n || std::mem::replace(&mut seen[img as usize], true) {
                return Err(Error::InvalidParams("not a permutation of the vertex set".into()));
            }
        }
        let edges: Vec<Vec<u16>> = (0..self.edge_count())
            .map(|i| self.edge_verts(i).iter().map(|&v| perm[v as usize]).collect())
            .collect();
        Self::from_edges(self.n, self.r, &edges)
    }

    /// Text form: header `n r edge_count`, one sorted edge per line in rank
    /// order.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.n, self.r, self.edge_count())?;
        for i in 0..self.edge_count() {
            let mut line = String::new();
            for (j, &v) in self.edge_verts(i).iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty graph file".into()))??;
        let mut parts = header.split_whitespace();
        let n: usize = Self::parse_field(parts.next(), "n")?;
        let rr: usize = Self::parse_field(parts.next(), "r")?;
        let count: usize = Self::parse_field(parts.next(), "edge_count")?;
        let mut edges = Vec::with_capacity(count);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let edge: Vec<u16> = line
                .split_whitespace()
                .map(|tok| tok.parse::<u16>().map_err(|_| Error::Format(format!("bad vertex token {tok:?}"))))
                .collect::<Result<_>>()?;
            edges.push(edge);
        }
        if edges.len() != count {
            return Err(Error::Format(format!(
                "header promises {count} edges, found {}",
                edges.len()
            )));
        }
        Self::from_edges(n, rr, &edges)
    }

    fn parse_field(tok: Option<&str>, name: &str) -> Result<usize> {
        tok.ok_or_else(|| Error::Format(format!("missing header field {name}")))?
            .parse()
            .map_err(|_| Error::Format(format!("bad header field {name}")))
    }

    /// Binary form: magic `HGR1`, then little-endian u32 n, u32 r, u64
    /// edge_count, u64 ranks in ascending order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"HGR1")?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.r as u32).to_le_bytes())?;
        w.write_all(&(self.edge_count() as u64).to_le_bytes())?;
        for &rank in &self.ranks {
            w.write_all(&rank.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"HGR1" {
            return Err(Error::Format("bad magic, expected HGR1".into()));
        }
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf4)?;
        let n = u32::from_le_bytes(buf4) as usize;
        r.read_exact(&mut buf4)?;
        let rr = u32::from_le_bytes(buf4) as usize;
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let count = u64::from_le_bytes(buf8) as usize;
        let mut ranks = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut buf8)?;
            ranks.push(u64::from_le_bytes(buf8));
        }
        Self::from_ranks(n, rr, ranks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        // First and tenth 3-subsets in colex order on 5 vertices.
        assert_eq!(rank_of(&[0, 1, 2]), 0);
        assert_eq!(rank_of(&[2, 3, 4]), 9);
        assert_eq!(unrank(5, 3, 0), vec![0, 1, 2]);
        assert_eq!(unrank(5, 3, 9), vec![2, 3, 4]);
    }

    #[test]
    fn rank_unrank_roundtrip_exhaustive() {
        let (n, r) = (9, 4);
        let space = binomial_u64(n as u64, r as u64).unwrap();
        let mut prev: Option<Vec<u16>> = None;
        for rank in 0..space {
            let verts = unrank(n, r, rank);
            assert!(verts.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(rank_of(&verts), rank);
            // Colex order on the reversed tuples is exactly rank order.
            if let Some(p) = prev {
                let rev = |v: &Vec<u16>| v.iter().rev().cloned().collect::<Vec<_>>();
                assert!(rev(&p) < rev(&verts));
            }
            prev = Some(verts);
        }
    }

    #[test]
    fn complete_graph_has_full_rank_space() {
        let g = Hypergraph::complete(7, 3).unwrap();
        assert_eq!(g.edge_count(), 35);
        assert!((0..35).all(|rk| g.contains_rank(rk)));
    }

    #[test]
    fn membership_and_masks() {
        let g = Hypergraph::from_edges(6, 3, &[vec![0, 1, 2], vec![3, 1, 5]]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.contains_sorted(&[0, 1, 2]));
        assert!(g.contains_sorted(&[1, 3, 5]));
        assert!(!g.contains_sorted(&[0, 1, 3]));
        let idx = (0..2).find(|&i| g.edge_verts(i) == [1, 3, 5]).unwrap();
        assert_eq!(g.edge_mask(idx), (1 << 1) | (1 << 3) | (1 << 5));
    }

    #[test]
    fn duplicate_edges_rejected() {
        assert!(Hypergraph::from_edges(6, 3, &[vec![0, 1, 2], vec![2, 1, 0]]).is_err());
        assert!(Hypergraph::from_ranks(6, 3, vec![4, 4]).is_err());
    }

    #[test]
    fn relabel_preserves_edge_count_and_is_invertible() {
        let g = Hypergraph::from_edges(5, 3, &[vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        let perm: Vec<u16> = vec![4, 3, 2, 1, 0];
        let h = g.relabel(&perm).unwrap();
        assert_eq!(h.edge_count(), 3);
        assert!(h.contains_sorted(&[2, 3, 4]));
        let back = h.relabel(&perm).unwrap();
        assert_eq!(back.ranks(), g.ranks());
    }

    #[test]
    fn text_roundtrip() {
        let g = Hypergraph::from_edges(6, 3, &[vec![0, 1, 2], vec![1, 3, 5], vec![2, 3, 4]]).unwrap();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("6 3 3\n"));
        let h = Hypergraph::read_text(&buf[..]).unwrap();
        assert_eq!(h.ranks(), g.ranks());
    }

    #[test]
    fn binary_roundtrip() {
        let g = Hypergraph::from_edges(10, 4, &[vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![2, 4, 8, 9]]).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"HGR1");
        let h = Hypergraph::read_binary(&buf[..]).unwrap();
        assert_eq!(h.ranks(), g.ranks());
        assert_eq!((h.n(), h.r()), (10, 4));
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(Hypergraph::read_text(&b"3 3\n"[..]).is_err());
        assert!(Hypergraph::read_text(&b"5 3 1\n0 1\n"[..]).is_err());
        assert!(Hypergraph::read_text(&b"5 3 2\n0 1 2\n"[..]).is_err());
        assert!(Hypergraph::read_binary(&b"HGRX"[..]).is_err());
    }
}
