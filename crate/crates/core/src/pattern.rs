//! Cycle and path window patterns.
//!
//! A Hamilton l-cycle copy is stored as its underlying cyclic vertex
//! sequence plus the derived windows: window i is the set of r consecutive
//! sequence entries starting at position i*s, indices mod n. Because the
//! sequence is a permutation and r < n, distinct windows are automatically
//! distinct vertex sets.
//!
//! A path with k edges is the open analogue: window i covers positions
//! [i*s, i*s + r) of a run of l + k*s distinct positions, no wraparound.
//! Paths are kept abstract (windows over positions, not vertices) because
//! the statistics code embeds them into concrete graphs itself.

use crate::error::{Error, Result};
use crate::graph::rank_of;
use crate::params::derive_constants;

/// A concrete Hamilton l-cycle on labeled vertices.
#[derive(Debug, Clone)]
pub struct CycleCopy {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    /// Cyclic vertex order; a permutation of 0..n-1.
    pub seq: Vec<u16>,
    /// Sorted vertex list of each window, in window order.
    pub windows: Vec<Vec<u16>>,
    /// Edge rank of each window, in window order.
    pub ranks: Vec<u64>,
}

impl CycleCopy {
    /// Wrap a vertex sequence into a cycle copy. The sequence must be a
    /// permutation of 0..n-1 with n divisible by s and n >= r + s.
    pub fn from_sequence(seq: Vec<u16>, r: usize, ell: usize) -> Result<Self> {
        let shape = derive_constants(r, ell)?;
        let n = seq.len();
        if n % shape.step != 0 || n < r + shape.step {
            return Err(Error::InvalidParams(format!(
                "cycle needs s | n and n >= r + s, got n={n} r={r} l={ell}"
            )));
        }
        let mut seen = vec![false; n];
        for &v in &seq {
            if (v as usize) >= n || std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidParams(
                    "cycle sequence must be a permutation of 0..n-1".into(),
                ));
            }
        }
        let m = n / shape.step;
        let mut windows = Vec::with_capacity(m);
        let mut ranks = Vec::with_capacity(m);
        for i in 0..m {
            let mut win: Vec<u16> = (0..r).map(|j| seq[(i * shape.step + j) % n]).collect();
            win.sort_unstable();
            ranks.push(rank_of(&win));
            windows.push(win);
        }
        Ok(CycleCopy { n, r, ell, seq, windows, ranks })
    }

    /// The canonical copy on the identity sequence 0, 1, ..., n-1.
    pub fn canonical(n: usize, r: usize, ell: usize) -> Result<Self> {
        Self::from_sequence((0..n as u16).collect(), r, ell)
    }

    pub fn m_edges(&self) -> usize {
        self.ranks.len()
    }

    /// Edge ranks sorted ascending, for set comparisons.
    pub fn sorted_ranks(&self) -> Vec<u64> {
        let mut rs = self.ranks.clone();
        rs.sort_unstable();
        rs
    }

    /// Number of edges shared with another copy on the same vertex set.
    pub fn overlap(&self, other: &CycleCopy) -> usize {
        let mine = self.sorted_ranks();
        other
            .ranks
            .iter()
            .filter(|rk| mine.binary_search(rk).is_ok())
            .count()
    }
}

/// An abstract path pattern with k edges over positions 0..v-1.
#[derive(Debug, Clone)]
pub struct PathPattern {
    pub r: usize,
    pub ell: usize,
    pub k: usize,
    /// Number of positions, l + k*s.
    pub v: usize,
    /// Window i is positions [i*s, i*s + r).
    pub windows: Vec<Vec<usize>>,
}

impl PathPattern {
    pub fn new(r: usize, ell: usize, k: usize) -> Result<Self> {
        let shape = derive_constants(r, ell)?;
        if k == 0 {
            return Err(Error::InvalidParams("path needs at least one edge".into()));
        }
        let v = ell + k * shape.step;
        let windows = (0..k)
            .map(|i| (i * shape.step..i * shape.step + r).collect())
            .collect();
        Ok(PathPattern { r, ell, k, v, windows })
    }

    /// The path realized on vertices 0..v-1, as plain edge lists. Used by
    /// the automorphism code.
    pub fn as_edges(&self) -> Vec<Vec<u16>> {
        self.windows
            .iter()
            .map(|w| w.iter().map(|&p| p as u16).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_cycle_windows() {
        let c = CycleCopy::canonical(5, 3, 2).unwrap();
        assert_eq!(c.m_edges(), 5);
        assert_eq!(c.windows[0], vec![0, 1, 2]);
        assert_eq!(c.windows[3], vec![0, 3, 4]);
        assert_eq!(c.windows[4], vec![0, 1, 4]);
    }

    #[test]
    fn loose_cycle_windows_advance_by_step() {
        let c = CycleCopy::canonical(8, 4, 2).unwrap();
        assert_eq!(c.m_edges(), 4);
        assert_eq!(c.windows[1], vec![2, 3, 4, 5]);
        assert_eq!(c.windows[3], vec![0, 1, 6, 7]);
    }

    #[test]
    fn windows_are_distinct_edges() {
        for (n, r, ell) in [(7, 3, 2), (12, 4, 2), (12, 4, 3), (12, 5, 2)] {
            let c = CycleCopy::canonical(n, r, ell).unwrap();
            let mut rs = c.sorted_ranks();
            rs.dedup();
            assert_eq!(rs.len(), c.m_edges(), "n={n} r={r} l={ell}");
        }
    }

    #[test]
    fn overlap_counts_shared_edges() {
        let a = CycleCopy::canonical(6, 3, 2).unwrap();
        let b = CycleCopy::from_sequence(vec![0, 1, 2, 3, 5, 4], 3, 2).unwrap();
        assert_eq!(a.overlap(&a), 6);
        // Swapping 4 and 5 changes the windows {2,3,4} and {5,0,1} and,
        // since windows are sets, no others.
        assert_eq!(a.overlap(&b), 4);
        assert_eq!(b.overlap(&a), 4);
    }

    #[test]
    fn bad_sequences_rejected() {
        assert!(CycleCopy::from_sequence(vec![0, 1, 2, 2], 3, 2).is_err());
        assert!(CycleCopy::from_sequence(vec![0, 1, 2], 3, 2).is_err()); // n < r + s
        assert!(CycleCopy::from_sequence((0..9u16).collect(), 4, 2).is_err()); // s=2, odd n
    }

    #[test]
    fn path_geometry() {
        let p = PathPattern::new(3, 2, 4).unwrap();
        assert_eq!(p.v, 6);
        assert_eq!(p.windows[3], vec![3, 4, 5]);
        let q = PathPattern::new(4, 2, 3).unwrap();
        assert_eq!(q.v, 8);
        assert_eq!(q.windows[2], vec![4, 5, 6, 7]);
    }
}
