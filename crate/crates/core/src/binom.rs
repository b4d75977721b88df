//! Small exact-combinatorics helpers shared across the crate.
//!
//! Everything here is integer arithmetic with explicit overflow behaviour.
//! The machine-width variants return `None` on overflow so that callers can
//! decide whether to guard, promote to big integers, or reject parameters.

use num_bigint::BigUint;
use num_traits::One;

/// Binomial coefficient C(n, k) in u128, `None` on overflow.
///
/// Uses the multiplicative form with an exact division at every step, so no
/// intermediate exceeds `result * (n - k + i)`.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - k + i + 1) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Binomial coefficient in u64, `None` if it does not fit.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    binomial_u128(n, k).and_then(|v| u64::try_from(v).ok())
}

/// Falling factorial (n)_k = n (n-1) ... (n-k+1) in u128, `None` on overflow.
pub fn falling_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
    }
    Some(acc)
}

/// Falling factorial as a big integer, exact for any size.
pub fn falling_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
    }
    acc
}

/// Factorial as a big integer.
pub fn factorial_big(n: u64) -> BigUint {
    falling_big(n, n)
}

/// Factorial in u64; valid for n <= 20.
pub fn factorial_u64(n: u64) -> Option<u64> {
    falling_u128(n, n).and_then(|v| u64::try_from(v).ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial_u128(5, 3), Some(10));
        assert_eq!(binomial_u128(60, 3), Some(34220));
        assert_eq!(binomial_u128(10, 0), Some(1));
        assert_eq!(binomial_u128(3, 7), Some(0));
    }

    #[test]
    fn binomial_symmetry_row_sums() {
        for n in 0..=30u64 {
            let mut row_sum: u128 = 0;
            for k in 0..=n {
                let c = binomial_u128(n, k).unwrap();
                assert_eq!(c, binomial_u128(n, n - k).unwrap());
                row_sum += c;
            }
            assert_eq!(row_sum, 1u128 << n);
        }
    }

    #[test]
    fn binomial_overflow_detected() {
        assert!(binomial_u128(300, 150).is_none());
        assert!(binomial_u64(80, 40).is_none());
    }

    #[test]
    fn falling_matches_factorial_ratio() {
        assert_eq!(falling_u128(10, 3), Some(720));
        assert_eq!(falling_u128(5, 5), Some(120));
        assert_eq!(falling_u128(4, 6), Some(0));
        assert_eq!(falling_big(60, 10), BigUint::from(falling_u128(60, 10).unwrap()));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial_u64(0), Some(1));
        assert_eq!(factorial_u64(6), Some(720));
        assert_eq!(factorial_big(20), BigUint::from(2432902008176640000u64));
    }
}
