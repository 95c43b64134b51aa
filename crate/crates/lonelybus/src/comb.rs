//! Small arbitrary-precision counting helpers.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficients built by Pascal's rule, memoized row by row.
pub(crate) struct Pascal {
    rows: Vec<Vec<BigUint>>,
}

impl Pascal {
    pub(crate) fn new() -> Self {
        Self {
            rows: vec![vec![BigUint::one()]],
        }
    }

    /// `C(n, k)`, growing the triangle on demand.
    pub(crate) fn choose(&mut self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        while self.rows.len() <= n {
            let prev = self.rows.last().expect("triangle starts non-empty");
            let mut row = Vec::with_capacity(prev.len() + 1);
            row.push(BigUint::one());
            for w in prev.windows(2) {
                row.push(&w[0] + &w[1]);
            }
            row.push(BigUint::one());
            self.rows.push(row);
        }
        self.rows[n][k].clone()
    }
}

/// Falling factorial `n * (n-1) * ... * (n-len+1)`, i.e. `n! / (n-len)!`.
pub(crate) fn falling_factorial(n: u64, len: u64) -> BigUint {
    debug_assert!(len <= n);
    let mut acc = BigUint::one();
    for i in 0..len {
        acc *= BigUint::from(n - i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_matches_known_rows() {
        let mut p = Pascal::new();
        assert_eq!(p.choose(0, 0), BigUint::from(1u32));
        assert_eq!(p.choose(5, 2), BigUint::from(10u32));
        assert_eq!(p.choose(10, 5), BigUint::from(252u32));
        assert_eq!(p.choose(3, 5), BigUint::zero());
        // Row sums are powers of two.
        let sum: BigUint = (0..=12usize).map(|k| p.choose(12, k)).sum();
        assert_eq!(sum, BigUint::from(1u32) << 12);
    }

    #[test]
    fn falling_factorial_edges() {
        assert_eq!(falling_factorial(5, 0), BigUint::from(1u32));
        assert_eq!(falling_factorial(5, 1), BigUint::from(5u32));
        assert_eq!(falling_factorial(5, 5), BigUint::from(120u32));
        assert_eq!(falling_factorial(26, 26), (1u32..=26).map(BigUint::from).product());
    }
}
