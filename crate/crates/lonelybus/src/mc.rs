//! Seedable Monte Carlo estimation of tail probabilities for parameter
//! ranges beyond the enumeration cap.
//!
//! The generator is counter-based so trials never share state: output `i` of
//! a stream is `mix64(key +_wrap i * GAMMA)`, where `mix64` is the SplitMix64
//! finalizer, `GAMMA` is the 64-bit golden-ratio constant, and the stream
//! key is derived as `mix64(seed ^ mix64((w + 1) * GAMMA))` for worker `w`.
//! Worker `w` runs `trials/W` (plus one of the first `trials mod W`) trials
//! on its own stream; hit counts combine by addition, so an estimate is a
//! pure function of `(n, k, r, trials, seed, worker count)` and does not
//! depend on scheduling or combination order.

use crate::model::Params;
use crate::{Error, Result};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective 64-bit mix.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based pseudorandom stream, splittable by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Stream `stream` of the generator seeded with `seed`; distinct
    /// streams never share outputs because the key derivation is injective
    /// in `stream` for a fixed seed.
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            key: mix64(seed ^ mix64(stream.wrapping_add(1).wrapping_mul(GAMMA))),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let value = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)));
        self.counter += 1;
        value
    }

    /// Uniform draw from `1..=bound` without modulo bias: draws above the
    /// largest multiple of `bound` are rejected and redrawn.
    pub fn uniform_bus(&mut self, bound: u32) -> u32 {
        debug_assert!(bound >= 1);
        let bound = u64::from(bound);
        let zone = (u64::MAX / bound) * bound;
        loop {
            let draw = self.next_u64();
            if draw < zone {
                return (draw % bound) as u32 + 1;
            }
        }
    }
}

/// Draws one `k`-bus allocation of `n` passengers and returns its lonely
/// count.
pub fn sample_lonely_count(params: &Params, rng: &mut CounterRng) -> u32 {
    let mut loads = vec![0u32; params.k() as usize];
    for _ in 0..params.n() {
        let bus = rng.uniform_bus(params.k());
        loads[(bus - 1) as usize] += 1;
    }
    loads.iter().filter(|&&l| l == 1).count() as u32
}

/// A sampled tail probability with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Trials with lonely count `>= r`.
    pub hits: u64,
    pub trials: u64,
    /// `hits / trials` as a decimal; the exact fraction is `hits/trials`.
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub workers: usize,
}

/// Two-sided 95% normal quantile for the Wilson score interval.
const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval; closed-form and well-behaved at 0 and 1, unlike
/// the normal approximation.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1, "interval needs at least one trial");
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (Z_95 / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // The exact bounds at the extremes are 0 and 1; pin them so rounding
    // residue cannot push the interval off the observed point.
    let low = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if hits == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

/// Estimates `P(lonely count >= r)` from `trials` independent allocations.
pub fn estimate_tail(
    params: &Params,
    r: u32,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    params.check_threshold(r)?;
    if trials < 1 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let workers = workers.max(1);
    let per_worker = |w: u64| trials / workers as u64 + u64::from(w < trials % workers as u64);

    let run_stream = |w: u64| {
        let mut rng = CounterRng::new(seed, w);
        let mut hits = 0u64;
        for _ in 0..per_worker(w) {
            if sample_lonely_count(params, &mut rng) >= r {
                hits += 1;
            }
        }
        hits
    };

    let hits: u64 = if workers == 1 {
        run_stream(0)
    } else {
        let mut counts = vec![0u64; workers];
        std::thread::scope(|scope| {
            for (w, slot) in counts.iter_mut().enumerate() {
                let run_stream = &run_stream;
                scope.spawn(move || *slot = run_stream(w as u64));
            }
        });
        counts.iter().sum()
    };

    let (ci_low, ci_high) = wilson_interval(hits, trials);
    Ok(Estimate {
        hits,
        trials,
        point: hits as f64 / trials as f64,
        ci_low,
        ci_high,
        seed,
        workers,
    })
}
