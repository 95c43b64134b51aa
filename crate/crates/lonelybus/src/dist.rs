//! Exact distribution of the lonely-passenger count, computed without
//! enumerating assignments.
//!
//! The counting kernel is `singleton_ways`: a bus-by-bus dynamic program
//! over (remaining passengers, remaining buses, singleton count) using
//! binomial coefficients. It avoids inclusion-exclusion entirely, so there
//! is no sign cancellation to worry about and every intermediate value is a
//! nonnegative integer.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::comb::Pascal;
use crate::model::Params;
use crate::prob::Probability;
use crate::{Error, Result};

/// Number of functions `[n] -> [k]` under which exactly `s` buses receive
/// exactly one passenger, for every `s = 0..=n`.
///
/// Recurrence: the newest bus takes some `j` of the remaining passengers
/// (`C(n, j)` choices), contributing a singleton exactly when `j = 1`:
///
/// ```text
/// W(n, k, s) = sum_j C(n, j) * W(n-j, k-1, s - [j=1]),   W(n, 0, s) = [n=0][s=0]
/// ```
///
/// The returned table sums to `k^n`.
pub fn singleton_ways(n: u32, k: u32) -> Vec<BigUint> {
    let n = n as usize;
    let mut pascal = Pascal::new();
    // table[m][s]: ways to place m labeled passengers into the buses added
    // so far with exactly s singleton buses. Zero buses: only m = 0 works.
    let mut table = vec![vec![BigUint::zero(); n + 1]; n + 1];
    table[0][0] = BigUint::one();
    for _bus in 0..k {
        let mut next = vec![vec![BigUint::zero(); n + 1]; n + 1];
        for m in 0..=n {
            for j in 0..=m {
                let ways = pascal.choose(m, j);
                let gained = usize::from(j == 1);
                for s in gained..=n {
                    let prev = &table[m - j][s - gained];
                    if !prev.is_zero() {
                        next[m][s] += prev * &ways;
                    }
                }
            }
        }
        table = next;
    }
    table.swap_remove(n)
}

/// Exact distribution of the lonely-passenger count for `n` passengers on
/// `k` buses. Masses are exact rationals with denominator dividing `k^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LonelyPmf {
    n: u32,
    k: u32,
    mass: Vec<Probability>,
}

impl LonelyPmf {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `P(L = s)`; zero for `s > n`.
    pub fn mass(&self, s: u32) -> Probability {
        self.mass.get(s as usize).cloned().unwrap_or_else(Probability::zero)
    }

    /// Masses indexed by `s = 0..=n`.
    pub fn masses(&self) -> &[Probability] {
        &self.mass
    }

    /// Tail probability `P(L >= r)`.
    pub fn tail(&self, r: u32) -> Probability {
        let sum: BigRational = self.mass[(r as usize).min(self.mass.len())..]
            .iter()
            .map(|p| p.as_ratio().clone())
            .sum();
        Probability::new(sum).expect("tail of a distribution stays in [0, 1]")
    }

    /// `E[L]` as an exact rational.
    pub fn expectation(&self) -> BigRational {
        self.mass
            .iter()
            .enumerate()
            .map(|(s, p)| BigRational::from(BigInt::from(s)) * p.as_ratio())
            .sum()
    }
}

/// Computes the exact lonely-count distribution via [`singleton_ways`].
pub fn exact_pmf(params: &Params) -> LonelyPmf {
    let (n, k) = (params.n(), params.k());
    let ways = singleton_ways(n, k);
    let total = BigUint::from(k).pow(n);
    let mass: Vec<Probability> = ways
        .into_iter()
        .map(|w| Probability::from_counts(w, total.clone()).expect("W[s] <= k^n"))
        .collect();
    debug_assert!(
        mass.iter().map(|p| p.as_ratio().clone()).sum::<BigRational>() == BigRational::one(),
        "masses must sum to one"
    );
    debug_assert!(mass[(n - 1) as usize].is_zero());
    LonelyPmf { n, k, mass }
}

/// Tail probability `P(L >= r)` for `n` passengers on `k` buses.
pub fn tail_prob(params: &Params, r: u32) -> Result<Probability> {
    params.check_threshold(r)?;
    Ok(exact_pmf(params).tail(r))
}

/// Expected number of lonely passengers, `n * (1 - 1/k)^{n-1}`, exactly.
pub fn expected_lonely(params: &Params) -> BigRational {
    let (n, k) = (params.n(), params.k());
    let ratio = BigRational::new(BigInt::from(k - 1), BigInt::from(k));
    BigRational::from(BigInt::from(n)) * ratio.pow((n - 1) as i32)
}

/// One `(k, r)` comparison in a dominance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceRow {
    pub k: u32,
    pub r: u32,
    /// `P(L >= r)` with `k` buses.
    pub tail_k: Probability,
    /// `P(L >= r)` with `k+1` buses.
    pub tail_k_plus_1: Probability,
    /// Whether `tail_k_plus_1 >= tail_k`.
    pub weak_holds: bool,
    /// Whether the inequality is strict; recorded separately because only
    /// `r = 1` is required to be strict.
    pub strict: bool,
}

/// Exact tail comparisons for every `k <= k_max` and `r <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    pub n: u32,
    pub k_max: u32,
    pub rows: Vec<DominanceRow>,
}

impl DominanceReport {
    /// Passes iff every row holds weakly and every `r = 1` row is strict.
    pub fn overall_pass(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.weak_holds && (row.r != 1 || row.strict))
    }
}

/// Builds the dominance table comparing `k` against `k+1` buses for every
/// `k <= k_max` and threshold `r <= n`, via the DP alone.
pub fn dominance_report(n: u32, k_max: u32) -> Result<DominanceReport> {
    if k_max < 1 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    // One PMF per bus count, shared across all thresholds.
    let pmfs: Vec<LonelyPmf> = (1..=k_max + 1)
        .map(|k| Params::new(n, k).map(|p| exact_pmf(&p)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity((k_max * n) as usize);
    for k in 1..=k_max {
        let lower = &pmfs[(k - 1) as usize];
        let upper = &pmfs[k as usize];
        for r in 1..=n {
            let tail_k = lower.tail(r);
            let tail_k_plus_1 = upper.tail(r);
            rows.push(DominanceRow {
                k,
                r,
                weak_holds: tail_k_plus_1 >= tail_k,
                strict: tail_k_plus_1 > tail_k,
                tail_k,
                tail_k_plus_1,
            });
        }
    }
    Ok(DominanceReport { n, k_max, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn params(n: u32, k: u32) -> Params {
        Params::new(n, k).unwrap()
    }

    fn prob(num: u64, den: u64) -> Probability {
        Probability::from_counts(num, den).unwrap()
    }

    /// Independent oracle: walk all k^n assignments with an odometer and
    /// histogram the number of singleton buses, counting loads by hand.
    fn histogram_by_enumeration(n: u32, k: u32) -> Vec<u64> {
        let mut hist = vec![0u64; n as usize + 1];
        let mut digits = vec![1u32; n as usize];
        loop {
            let mut loads = vec![0u32; k as usize];
            for &bus in &digits {
                loads[(bus - 1) as usize] += 1;
            }
            let lonely = loads.iter().filter(|&&l| l == 1).count();
            hist[lonely] += 1;
            let mut pos = n as usize;
            loop {
                if pos == 0 {
                    return hist;
                }
                pos -= 1;
                if digits[pos] < k {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 1;
            }
        }
    }

    #[test]
    fn singleton_ways_examples() {
        let w = singleton_ways(2, 2);
        assert_eq!(w[0], BigUint::from(2u32));
        assert_eq!(w[1], BigUint::zero());
        assert_eq!(w[2], BigUint::from(2u32));

        let w = singleton_ways(3, 2);
        assert_eq!(w[0], BigUint::from(2u32));
        assert_eq!(w[1], BigUint::from(6u32));
        assert!(w[2].is_zero() && w[3].is_zero());

        let w = singleton_ways(3, 3);
        assert_eq!(w[0], BigUint::from(3u32));
        assert_eq!(w[1], BigUint::from(18u32));
        assert_eq!(w[2], BigUint::zero());
        assert_eq!(w[3], BigUint::from(6u32));
    }

    #[test]
    fn singleton_ways_degenerate_sizes() {
        assert_eq!(singleton_ways(0, 0), vec![BigUint::one()]);
        assert_eq!(singleton_ways(0, 3), vec![BigUint::one()]);
        let w = singleton_ways(2, 0);
        assert!(w.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn singleton_ways_matches_enumeration() {
        for n in 1..=6u32 {
            for k in 1..=4u32 {
                let w = singleton_ways(n, k);
                let hist = histogram_by_enumeration(n, k);
                for (s, count) in hist.iter().enumerate() {
                    assert_eq!(
                        w[s],
                        BigUint::from(*count),
                        "W({n},{k})[{s}] disagrees with enumeration"
                    );
                }
            }
        }
    }

    #[test]
    fn pmf_examples() {
        let pmf = exact_pmf(&params(3, 2));
        assert_eq!(pmf.mass(0), prob(1, 4));
        assert_eq!(pmf.mass(1), prob(3, 4));
        assert!(pmf.mass(2).is_zero() && pmf.mass(3).is_zero());

        let pmf = exact_pmf(&params(3, 3));
        assert_eq!(pmf.mass(0), prob(1, 9));
        assert_eq!(pmf.mass(1), prob(2, 3));
        assert!(pmf.mass(2).is_zero());
        assert_eq!(pmf.mass(3), prob(2, 9));

        let pmf = exact_pmf(&params(2, 1));
        assert_eq!(pmf.mass(0), Probability::one());
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_prob(&params(2, 2), 1).unwrap(), prob(1, 2));
        assert_eq!(tail_prob(&params(3, 3), 3).unwrap(), prob(2, 9));
        assert!(tail_prob(&params(3, 2), 3).unwrap().is_zero());
        assert!(tail_prob(&params(3, 2), 0).is_err());
        assert!(tail_prob(&params(3, 2), 4).is_err());
    }

    #[test]
    fn expected_lonely_examples() {
        assert_eq!(expected_lonely(&params(2, 2)), BigRational::one());
        assert_eq!(
            expected_lonely(&params(2, 3)),
            BigRational::new(BigInt::from(4), BigInt::from(3))
        );
        for n in 2..=6 {
            assert!(expected_lonely(&params(n, 1)).is_zero());
        }
    }

    #[test]
    fn dominance_example_rows() {
        let report = dominance_report(3, 2).unwrap();
        let row = |k, r| {
            report
                .rows
                .iter()
                .find(|row| row.k == k && row.r == r)
                .unwrap()
        };
        let r12 = row(2, 1);
        assert_eq!(r12.tail_k, prob(3, 4));
        assert_eq!(r12.tail_k_plus_1, prob(8, 9));
        assert!(r12.strict);

        let r11 = row(1, 1);
        assert!(r11.tail_k.is_zero());
        assert_eq!(r11.tail_k_plus_1, prob(3, 4));
        assert!(r11.strict);

        // One bus never yields a lonely passenger; two make it a coin flip.
        let small = dominance_report(2, 1).unwrap();
        assert!(small.rows[0].tail_k.is_zero());
        assert_eq!(small.rows[0].tail_k_plus_1, prob(1, 2));
        assert!(small.rows[0].strict);

        let r32 = row(2, 3);
        assert!(r32.tail_k.is_zero());
        assert_eq!(r32.tail_k_plus_1, prob(2, 9));
        assert!(r32.weak_holds);

        assert!(report.overall_pass());
    }

    #[test]
    fn mass_at_n_minus_one_is_always_zero() {
        for n in 2..=8u32 {
            for k in 1..=5u32 {
                assert!(exact_pmf(&params(n, k)).mass(n - 1).is_zero(), "n={n} k={k}");
            }
        }
    }

    proptest! {
        #[test]
        fn pmf_normalizes_and_tail_decreases(n in 2u32..9, k in 1u32..7) {
            let pmf = exact_pmf(&params(n, k));
            let total: BigRational =
                pmf.masses().iter().map(|p| p.as_ratio().clone()).sum();
            prop_assert_eq!(total, BigRational::one());
            // Denominators divide k^n.
            let kn = BigInt::from(BigUint::from(k).pow(n));
            for p in pmf.masses() {
                prop_assert!((&kn % p.as_ratio().denom()).is_zero());
            }
            for r in 1..n {
                prop_assert!(pmf.tail(r) >= pmf.tail(r + 1));
            }
            prop_assert_eq!(
                pmf.tail(1).into_ratio(),
                BigRational::one() - pmf.mass(0).as_ratio()
            );
        }

        #[test]
        fn expectation_matches_formula(n in 2u32..10, k in 1u32..8) {
            let p = params(n, k);
            prop_assert_eq!(exact_pmf(&p).expectation(), expected_lonely(&p));
        }

        #[test]
        fn ways_sum_to_k_pow_n(n in 0u32..8, k in 0u32..6) {
            let total: BigUint = singleton_ways(n, k).into_iter().sum();
            let expect = if k == 0 && n > 0 {
                BigUint::zero()
            } else {
                BigUint::from(k).pow(n)
            };
            prop_assert_eq!(total, expect);
        }
    }

    #[test]
    fn expectation_to_f64_sanity() {
        // 5 * (3/4)^4 = 1.582...; the decimal view must agree with the exact one.
        let e = expected_lonely(&params(5, 4));
        assert!((e.to_f64().unwrap() - 5.0 * 0.75f64.powi(4)).abs() < 1e-12);
    }
}
