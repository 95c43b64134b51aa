//! Calibration of the sampling estimator against the exact DP on a grid
//! wide enough to catch bias, seeding, or interval bugs.

use lonelybus::{dist, mc, Params};

const TRIALS: u64 = 100_000;
const SEED: u64 = 7_654_321;

fn params(n: u32, k: u32) -> Params {
    Params::new(n, k).unwrap()
}

#[test]
fn wilson_intervals_are_calibrated_on_the_grid() {
    let mut runs = 0u32;
    let mut covered = 0u32;
    for n in [3u32, 5, 8] {
        for k in [2u32, 3, 5] {
            for r in [1u32, 2] {
                let p = params(n, k);
                let exact = dist::tail_prob(&p, r).unwrap().to_f64();
                let est = mc::estimate_tail(&p, r, TRIALS, SEED, 1).unwrap();
                runs += 1;
                if est.ci_low <= exact && exact <= est.ci_high {
                    covered += 1;
                } else {
                    // A miss may happen to a 95% interval, but never by much:
                    // more than five standard errors is an implementation bug.
                    let se = (exact * (1.0 - exact) / TRIALS as f64).sqrt();
                    let gap = (est.ci_low - exact).max(exact - est.ci_high);
                    assert!(
                        gap <= 5.0 * se,
                        "(n={n},k={k},r={r}): exact {exact} misses [{}, {}] by {gap} > 5se={}",
                        est.ci_low,
                        est.ci_high,
                        5.0 * se
                    );
                }
            }
        }
    }
    // 95% expected coverage; 80% bounds flakiness on 18 runs.
    assert!(
        covered * 5 >= runs * 4,
        "only {covered}/{runs} intervals covered their exact value"
    );
}

#[test]
fn estimated_tails_are_monotone_in_k_up_to_noise() {
    for n in [3u32, 5, 8] {
        for k in [2u32, 3, 5] {
            let lower = mc::estimate_tail(&params(n, k), 1, TRIALS, SEED, 1).unwrap();
            let upper = mc::estimate_tail(&params(n, k + 1), 1, TRIALS, SEED + 1, 1).unwrap();
            let se = |e: &mc::Estimate| (e.point * (1.0 - e.point) / e.trials as f64).sqrt();
            let combined = (se(&lower).powi(2) + se(&upper).powi(2)).sqrt();
            assert!(
                upper.point >= lower.point - 3.0 * combined,
                "(n={n}): estimated tail fell from k={k} to k={} beyond noise",
                k + 1
            );
        }
    }
}

#[test]
fn estimates_reproduce_for_every_worker_count() {
    let p = params(6, 3);
    for workers in [1usize, 2, 3, 8] {
        let a = mc::estimate_tail(&p, 1, 10_000, 5, workers).unwrap();
        let b = mc::estimate_tail(&p, 1, 10_000, 5, workers).unwrap();
        assert_eq!(a, b, "workers={workers} not reproducible");
        assert_eq!(a.workers, workers.max(1));
        assert_eq!(a.trials, 10_000);
    }
}
