//! Model parameters and the arithmetic constants they determine.
//!
//! An l-cycle in an r-uniform hypergraph on n vertices is a cyclic vertex
//! ordering whose edges are the windows of r consecutive vertices taken
//! every s = r - l positions, so consecutive edges share exactly l
//! vertices. The cycle exists only when s divides n, and it then has
//! m = n / s edges.

use serde::{Deserialize, Serialize};

use crate::binom::{binomial_u64, factorial_u64};
use crate::error::{Error, Result};

/// Vertices a pattern can have before the u128 bitmask representation used
/// by the counting kernels overflows.
pub const MAX_VERTICES: usize = 128;

/// Constants determined by (r, l) alone.
///
/// `step` is s = r - l. `offset` is the unique t in [1, s] with
/// t = r (mod s); a window covers its last partial block in exactly t
/// positions, which makes t the size of the "joint" between consecutive
/// blocks of s vertices. `lambda` = t! (s-t)! counts the orderings within
/// one block that leave every window's vertex set unchanged, the per-block
/// symmetry factor appearing in automorphism counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleShape {
    pub r: usize,
    pub ell: usize,
    pub step: usize,
    pub offset: usize,
    pub lambda: u64,
}

/// Derive (s, t, lambda) from the uniformity r and overlap l.
pub fn derive_constants(r: usize, ell: usize) -> Result<CycleShape> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("uniformity r={r} must be at least 2")));
    }
    if ell < 1 || ell >= r {
        return Err(Error::InvalidParams(format!(
            "overlap l={ell} must satisfy 1 <= l < r={r}"
        )));
    }
    let s = r - ell;
    let t = ((r - 1) % s) + 1;
    debug_assert!((1..=s).contains(&t) && (r - t) % s == 0);
    let lambda = factorial_u64(t as u64)
        .zip(factorial_u64((s - t) as u64))
        .map(|(a, b)| a * b)
        .ok_or_else(|| Error::InvalidParams(format!("lambda overflows u64 for r={r}, l={ell}")))?;
    Ok(CycleShape { r, ell, step: s, offset: t, lambda })
}

/// A fully specified random hypergraph model G_r(n, p) together with the
/// cycle overlap l under study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub p: f64,
}

impl Params {
    /// Validate and construct. Requires s | n so that the Hamilton l-cycle
    /// exists, n >= r + s so that windows are genuinely distinct sets, and
    /// n small enough for the bitmask kernels.
    pub fn new(n: usize, r: usize, ell: usize, p: f64) -> Result<Self> {
        let shape = derive_constants(r, ell)?;
        if n > MAX_VERTICES {
            return Err(Error::InvalidParams(format!(
                "n={n} exceeds the supported maximum {MAX_VERTICES}"
            )));
        }
        if n % shape.step != 0 {
            return Err(Error::InvalidParams(format!(
                "step s={} must divide n={n} for a Hamilton l-cycle to exist",
                shape.step
            )));
        }
        if n < r + shape.step {
            return Err(Error::InvalidParams(format!(
                "n={n} is too small; need n >= r + s = {}",
                r + shape.step
            )));
        }
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParams(format!("edge probability p={p} must lie in [0, 1]")));
        }
        if binomial_u64(n as u64, r as u64).is_none() {
            return Err(Error::InvalidParams(format!(
                "edge rank space C({n}, {r}) does not fit in u64"
            )));
        }
        Ok(Params { n, r, ell, p })
    }

    pub fn shape(&self) -> CycleShape {
        // Validated in the constructor.
        derive_constants(self.r, self.ell).expect("validated at construction")
    }

    /// Number of edges in a Hamilton l-cycle, m = n / s.
    pub fn m_edges(&self) -> usize {
        self.n / self.shape().step
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Params::new(self.n, self.r, self.ell, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_constants_match_hand_values() {
        // (r, l) -> (s, t, lambda), checked by hand from the definitions.
        let cases = [
            (3, 2, 1, 1, 1u64),
            (4, 2, 2, 2, 2),
            (4, 3, 1, 1, 1),
            (5, 2, 3, 2, 2),
            (5, 4, 1, 1, 1),
            (7, 3, 4, 3, 6),
            (6, 2, 4, 2, 4),
        ];
        for (r, ell, s, t, lambda) in cases {
            let c = derive_constants(r, ell).unwrap();
            assert_eq!((c.step, c.offset, c.lambda), (s, t, lambda), "r={r} l={ell}");
        }
    }

    #[test]
    fn offset_is_the_unique_residue_in_range() {
        for r in 2..=12 {
            for ell in 1..r {
                let c = derive_constants(r, ell).unwrap();
                let matches = (1..=c.step).filter(|t| (r - t) % c.step == 0).count();
                assert_eq!(matches, 1);
                assert_eq!((r - c.offset) % c.step, 0);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(Params::new(9, 4, 2, 0.5).is_err()); // s=2 does not divide 9
        assert!(Params::new(3, 3, 2, 0.5).is_err()); // n < r + s
        assert!(Params::new(12, 3, 3, 0.5).is_err()); // l >= r
        assert!(Params::new(12, 3, 0, 0.5).is_err()); // l < 1
        assert!(Params::new(12, 3, 2, 1.5).is_err()); // p out of range
        assert!(Params::new(12, 3, 2, f64::NAN).is_err());
        assert!(Params::new(200, 3, 2, 0.5).is_err()); // n over bitmask limit
    }

    #[test]
    fn edge_counts() {
        assert_eq!(Params::new(12, 3, 2, 0.1).unwrap().m_edges(), 12);
        assert_eq!(Params::new(12, 4, 2, 0.1).unwrap().m_edges(), 6);
        assert_eq!(Params::new(12, 5, 2, 0.1).unwrap().m_edges(), 4);
    }
}
