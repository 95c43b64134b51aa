//! Pure predicates classifying a configuration against every event family
//! used by the two coupling proofs.
//!
//! Both proofs compare the "loss side" (lonely passengers exist before
//! reassignment but not after) with the "gain side" (the reverse). Theorem 1
//! covers the existence threshold `r = 1`; theorem 2 covers `r >= 2` lonely
//! passengers. The event families:
//!
//! - Theorem 1 loss cells (`B_m` in the proofs): the extra bus holds one
//!   rider whose target bus already has `m-1` passengers, and no other kept
//!   bus is a singleton. Reassignment merges the rider away, so loneliness
//!   is lost.
//! - Theorem 1 gain cover (`B'_m`) and witnesses (`C_{m,i}`): the extra bus
//!   holds `m >= 2` riders, no kept bus is a singleton, and at least one of
//!   the first `m` target buses is empty (witness index `i`). Every
//!   configuration that gains loneliness lands in some cover cell.
//! - Theorem 2 gain cells (`D'_{m,l}`) and pinned witness sets
//!   (`E_{m,l,S}`): extra-bus load `m`, exactly `l` kept singletons, at
//!   least `r-l` empty kept buses hit by exactly one of the first `m`
//!   targets, plus a tightness condition when there are exactly `r-l`.
//! - Theorem 2 loss set (`D`) and cells (`D_{m,l}`): the extra bus holds
//!   one rider, `r-1` or `r` kept singletons, the first non-lonely target
//!   index exceeds 1, and the earlier targets are pairwise distinct.
//!
//! All predicates are pure functions of the configuration; the raw per-cell
//! predicates transcribe the event definitions literally so the verifier
//! can confirm disjointness and coverage without trusting the classifier's
//! cell derivation.

use itertools::Itertools;

use crate::model::{Configuration, Occupancy, Params};

/// First index `j` in `1..=n` whose target bus is not a singleton before
/// reassignment (`X_{Y_j} != 1`), or 0 when every target bus is one.
pub fn first_nonlonely_index(config: &Configuration, params: &Params) -> u32 {
    let x = config.occupancy(params);
    first_nonlonely_given(&x, config)
}

pub(crate) fn first_nonlonely_given(x: &Occupancy, config: &Configuration) -> u32 {
    for (pos, &y) in config.targets().iter().enumerate() {
        if x.load(y) != 1 {
            return pos as u32 + 1;
        }
    }
    0
}

/// Events of the existence proof (`r = 1`).
pub mod theorem1 {
    use super::*;

    /// Per-configuration membership record for the theorem 1 events.
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct Flags {
        /// Some bus (including the extra one) is a singleton before.
        pub lonely_before: bool,
        /// Some kept bus is a singleton after reassignment.
        pub lonely_after: bool,
        /// The unique loss cell `m` containing the configuration, if any.
        pub loss_cell: Option<u32>,
        /// The unique gain-cover cell `m` containing the configuration, if any.
        pub gain_cover: Option<u32>,
        /// Witness indices `i <= m` whose target bus is empty; nonempty
        /// exactly when `gain_cover` is set.
        pub gain_witnesses: Vec<u32>,
    }

    /// Evaluates every theorem 1 event on one configuration.
    pub fn classify(config: &Configuration, params: &Params) -> Flags {
        let x = config.occupancy(params);
        let (_, after) = config.reassign(params);
        classify_given(&x, &after, config, params)
    }

    pub(crate) fn classify_given(
        x: &Occupancy,
        after: &Occupancy,
        config: &Configuration,
        params: &Params,
    ) -> Flags {
        let k = params.k();
        let lonely_before = x.lonely_count() >= 1;
        let lonely_after = after.lonely_count() >= 1;

        let extra_load = x.load(params.extra_bus());

        // Loss cell: lone extra-bus rider, target bus already occupied, and
        // no kept singleton elsewhere. The cell index is the merged load.
        let mut loss_cell = None;
        if extra_load == 1 {
            let y1 = config.target(1);
            let merged = x.load(y1) + 1;
            if merged >= 2 && (1..=k).all(|i| i == y1 || x.load(i) != 1) {
                loss_cell = Some(merged);
            }
        }

        // Gain cover: m >= 2 riders to spill, no kept singleton, and some
        // consumed target bus empty.
        let mut gain_cover = None;
        let mut gain_witnesses = Vec::new();
        if extra_load >= 2 && (1..=k).all(|i| x.load(i) != 1) {
            gain_witnesses = (1..=extra_load)
                .filter(|&i| x.load(config.target(i)) == 0)
                .collect();
            if !gain_witnesses.is_empty() {
                gain_cover = Some(extra_load);
            }
        }

        Flags {
            lonely_before,
            lonely_after,
            loss_cell,
            gain_cover,
            gain_witnesses,
        }
    }

    /// Literal loss-cell membership: extra-bus load 1, `X_{Y_1} = m - 1`,
    /// and no kept bus other than `Y_1` is a singleton.
    pub fn in_loss_cell(config: &Configuration, params: &Params, m: u32) -> bool {
        in_loss_cell_given(&config.occupancy(params), config, params, m)
    }

    pub(crate) fn in_loss_cell_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        m: u32,
    ) -> bool {
        if m < 2 || m > params.n() {
            return false;
        }
        if x.load(params.extra_bus()) != 1 {
            return false;
        }
        let y1 = config.target(1);
        x.load(y1) == m - 1 && (1..=params.k()).all(|i| i == y1 || x.load(i) != 1)
    }

    /// Literal gain-cover membership: extra-bus load `m >= 2`, no kept
    /// singleton, and some target index `j <= m` points at an empty bus.
    pub fn in_gain_cover(config: &Configuration, params: &Params, m: u32) -> bool {
        in_gain_cover_given(&config.occupancy(params), config, params, m)
    }

    pub(crate) fn in_gain_cover_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        m: u32,
    ) -> bool {
        if m < 2 || m > params.n() {
            return false;
        }
        x.load(params.extra_bus()) == m
            && (1..=params.k()).all(|i| x.load(i) != 1)
            && (1..=m).any(|j| x.load(config.target(j)) == 0)
    }

    /// Gain-cover membership with pinned witness `i <= m` (`X_{Y_i} = 0`).
    pub fn in_gain_witness(config: &Configuration, params: &Params, m: u32, i: u32) -> bool {
        let x = config.occupancy(params);
        in_gain_witness_given(&x, config, params, m, i)
    }

    pub(crate) fn in_gain_witness_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        m: u32,
        i: u32,
    ) -> bool {
        i >= 1
            && i <= m
            && in_gain_cover_given(x, config, params, m)
            && x.load(config.target(i)) == 0
    }
}

/// Events of the stochastic-dominance proof (`r >= 2`).
pub mod theorem2 {
    use super::*;

    /// Per-configuration membership record for the theorem 2 events at a
    /// fixed threshold `r`.
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct Flags {
        /// At least `r` singleton buses before (extra bus included).
        pub at_least_r_before: bool,
        /// At least `r` singleton kept buses after reassignment.
        pub at_least_r_after: bool,
        /// The unique gain cell `(m, l)` containing the configuration, if any.
        pub gain_cell: Option<(u32, u32)>,
        /// Witness index sets `S` (sorted, each of size `r - l`) pinning the
        /// gain cell; empty exactly when `gain_cell` is unset.
        pub witness_sets: Vec<Vec<u32>>,
        /// Membership in the loss set.
        pub in_loss_set: bool,
        /// The unique loss cell `(m, l)`, set exactly when `in_loss_set`.
        pub loss_cell: Option<(u32, u32)>,
        /// First non-lonely target index (0 when every target bus is a
        /// singleton).
        pub first_nonlonely: u32,
    }

    /// Finite index set of cells: pairs `(m, l)` with `m >= 2`, `l >= 0`,
    /// `0 < r - l <= m`, truncated to `m <= n`. Cells with `m > n` are empty
    /// because the extra bus never holds more than `n` passengers.
    ///
    /// # Panics
    ///
    /// Panics unless `2 <= r <= n`.
    pub fn cell_index_set(n: u32, r: u32) -> Vec<(u32, u32)> {
        assert!((2..=n).contains(&r), "threshold r={r} outside 2..={n}");
        let mut cells = Vec::new();
        for m in 2..=n {
            let min_l = r.saturating_sub(m);
            for l in min_l..r {
                cells.push((m, l));
            }
        }
        cells
    }

    /// Target indices `j <= m` that point at an empty bus hit by no other
    /// target index `<= m`: the candidate witnesses of the gain cells.
    fn good_indices(x: &Occupancy, config: &Configuration, m: u32) -> Vec<u32> {
        (1..=m)
            .filter(|&j| {
                let bus = config.target(j);
                x.load(bus) == 0
                    && (1..=m).filter(|&j2| config.target(j2) == bus).count() == 1
            })
            .collect()
    }

    /// Evaluates every theorem 2 event on one configuration.
    ///
    /// # Panics
    ///
    /// Panics unless `2 <= r <= n`.
    pub fn classify(config: &Configuration, params: &Params, r: u32) -> Flags {
        let x = config.occupancy(params);
        let (_, after) = config.reassign(params);
        classify_given(&x, &after, config, params, r)
    }

    pub(crate) fn classify_given(
        x: &Occupancy,
        after: &Occupancy,
        config: &Configuration,
        params: &Params,
        r: u32,
    ) -> Flags {
        assert!(
            (2..=params.n()).contains(&r),
            "threshold r={r} outside 2..={}",
            params.n()
        );
        let k = params.k();
        let at_least_r_before = x.lonely_count() >= r;
        let at_least_r_after = after.lonely_count() >= r;

        let m = x.load(params.extra_bus());
        let kept_singletons = x.singletons_among(k);
        let first_nonlonely = first_nonlonely_given(x, config);

        // Gain cell: the candidate (m, l) is pinned by the occupancy; check
        // the remaining two conditions.
        let mut gain_cell = None;
        let mut witness_sets = Vec::new();
        let l = kept_singletons;
        if m >= 2 && l < r && r - l <= m {
            let good = good_indices(x, config, m);
            let needed = (r - l) as usize;
            let tight_ok = good.len() > needed
                || (1..=m).all(|j| x.load(config.target(j)) != 1);
            if good.len() >= needed && tight_ok {
                gain_cell = Some((m, l));
                witness_sets = good
                    .into_iter()
                    .combinations(needed)
                    .collect();
            }
        }

        // Loss set: lone extra-bus rider, r-1 or r kept singletons, the
        // first non-lonely target comes strictly after index 1, and all
        // earlier targets are pairwise distinct.
        let j = first_nonlonely;
        let earlier_distinct = j <= 1 || {
            let prefix = &config.targets()[..(j - 1) as usize];
            (1..prefix.len()).all(|i| !prefix[..i].contains(&prefix[i]))
        };
        let in_loss_set = x.load(params.extra_bus()) == 1
            && (kept_singletons + 1 == r || kept_singletons == r)
            && j > 1
            && earlier_distinct;

        let loss_cell = if in_loss_set {
            if kept_singletons + 1 == r {
                // The distinct singleton prefix forces j <= r here.
                Some((j + x.load(config.target(j)), r - j))
            } else {
                // Here j may reach r + 1, so subtract after adding.
                Some((j, r + 1 - j))
            }
        } else {
            None
        };

        Flags {
            at_least_r_before,
            at_least_r_after,
            gain_cell,
            witness_sets,
            in_loss_set,
            loss_cell,
            first_nonlonely,
        }
    }

    /// Literal gain-cell membership: the four defining conditions, checked
    /// over buses rather than via the classifier's derivation.
    pub fn in_gain_cell(config: &Configuration, params: &Params, r: u32, m: u32, l: u32) -> bool {
        in_gain_cell_given(&config.occupancy(params), config, params, r, m, l)
    }

    pub(crate) fn in_gain_cell_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        r: u32,
        m: u32,
        l: u32,
    ) -> bool {
        // The family is indexed by m >= 2, l >= 0 with 0 < r - l <= m.
        if m < 2 || l >= r || r - l > m {
            return false;
        }
        if x.load(params.extra_bus()) != m {
            return false;
        }
        if x.singletons_among(params.k()) != l {
            return false;
        }
        // Buses s <= k that are empty and hit by exactly one target index <= m.
        let witnesses = (1..=params.k())
            .filter(|&s| {
                x.load(s) == 0
                    && (1..=m).filter(|&j| config.target(j) == s).count() == 1
            })
            .count();
        if witnesses < (r - l) as usize {
            return false;
        }
        if witnesses == (r - l) as usize {
            // Tightness: no consumed target may point at a singleton.
            if (1..=m).any(|j| x.load(config.target(j)) == 1) {
                return false;
            }
        }
        true
    }

    /// Gain-cell membership with the index set `s` pinned as witnesses:
    /// every `j` in `s` targets an empty bus and is the only index `<= m`
    /// with that target.
    pub fn in_gain_witness(
        config: &Configuration,
        params: &Params,
        r: u32,
        m: u32,
        l: u32,
        s: &[u32],
    ) -> bool {
        let x = config.occupancy(params);
        in_gain_witness_given(&x, config, params, r, m, l, s)
    }

    pub(crate) fn in_gain_witness_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        r: u32,
        m: u32,
        l: u32,
        s: &[u32],
    ) -> bool {
        if l >= r || s.len() != (r - l) as usize {
            return false;
        }
        if !in_gain_cell_given(x, config, params, r, m, l) {
            return false;
        }
        s.iter().all(|&j| {
            j >= 1 && j <= m && {
                let bus = config.target(j);
                x.load(bus) == 0
                    && (1..=m).filter(|&j2| config.target(j2) == bus).count() == 1
            }
        })
    }

    /// Literal loss-set membership: the four defining conditions.
    pub fn in_loss_set(config: &Configuration, params: &Params, r: u32) -> bool {
        in_loss_set_given(&config.occupancy(params), config, params, r)
    }

    pub(crate) fn in_loss_set_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        r: u32,
    ) -> bool {
        if x.load(params.extra_bus()) != 1 {
            return false;
        }
        let singles = x.singletons_among(params.k());
        if singles + 1 != r && singles != r {
            return false;
        }
        let j = first_nonlonely_given(x, config);
        if j <= 1 {
            return false;
        }
        let prefix = &config.targets()[..(j - 1) as usize];
        (1..prefix.len()).all(|i| !prefix[..i].contains(&prefix[i]))
    }

    /// Literal loss-cell membership: loss set plus one of the two cell
    /// equations tying `(m, l)` to the first non-lonely index.
    pub fn in_loss_cell(config: &Configuration, params: &Params, r: u32, m: u32, l: u32) -> bool {
        in_loss_cell_given(&config.occupancy(params), config, params, r, m, l)
    }

    pub(crate) fn in_loss_cell_given(
        x: &Occupancy,
        config: &Configuration,
        params: &Params,
        r: u32,
        m: u32,
        l: u32,
    ) -> bool {
        if !in_loss_set_given(x, config, params, r) {
            return false;
        }
        let singles = x.singletons_among(params.k());
        let j = first_nonlonely_given(x, config);
        let (jm, jl, jr) = (i64::from(j), i64::from(l), i64::from(r));
        if singles + 1 == r {
            jm + i64::from(x.load(config.target(j))) == i64::from(m) && jr - jm == jl
        } else {
            jm == i64::from(m) && jr - jm + 1 == jl
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Params;

    fn config(assignment: &[u32], targets: &[u32], params: &Params) -> Configuration {
        Configuration::new(assignment.to_vec(), targets.to_vec(), params).unwrap()
    }

    #[test]
    fn first_nonlonely_index_examples() {
        let p = Params::new(3, 2).unwrap();
        // X = (2, 0, 1); Y_1 = 1 targets a bus with load 2.
        let c = config(&[3, 1, 1], &[1, 1, 1], &p);
        assert_eq!(first_nonlonely_index(&c, &p), 1);
        // X = (1, 1, 1); every target bus is a singleton.
        let c = config(&[1, 2, 3], &[1, 1, 2], &p);
        assert_eq!(first_nonlonely_index(&c, &p), 0);
        let c = config(&[3, 1, 2], &[1, 2, 2], &p);
        assert_eq!(first_nonlonely_index(&c, &p), 0);
    }

    #[test]
    fn theorem1_classify_examples() {
        let p = Params::new(2, 1).unwrap();

        let flags = theorem1::classify(&config(&[1, 2], &[1, 1], &p), &p);
        assert!(flags.lonely_before);
        assert!(!flags.lonely_after);
        assert_eq!(flags.loss_cell, Some(2));
        assert_eq!(flags.gain_cover, None);

        let flags = theorem1::classify(&config(&[2, 2], &[1, 1], &p), &p);
        assert!(!flags.lonely_before);
        assert_eq!(flags.gain_cover, Some(2));
        assert_eq!(flags.gain_witnesses, vec![1, 2]);
        assert_eq!(flags.loss_cell, None);

        let flags = theorem1::classify(&config(&[1, 1], &[1, 1], &p), &p);
        assert!(!flags.lonely_before);
        assert!(!flags.lonely_after);
        assert_eq!(flags.loss_cell, None);
        assert_eq!(flags.gain_cover, None);
        assert!(flags.gain_witnesses.is_empty());
    }

    #[test]
    fn theorem1_raw_predicates_match_classifier() {
        let p = Params::new(2, 1).unwrap();
        let c = config(&[1, 2], &[1, 1], &p);
        assert!(theorem1::in_loss_cell(&c, &p, 2));
        assert!(!theorem1::in_loss_cell(&c, &p, 1));
        assert!(!theorem1::in_gain_cover(&c, &p, 2));

        let c = config(&[2, 2], &[1, 1], &p);
        assert!(theorem1::in_gain_cover(&c, &p, 2));
        assert!(theorem1::in_gain_witness(&c, &p, 2, 1));
        assert!(theorem1::in_gain_witness(&c, &p, 2, 2));
        assert!(!theorem1::in_gain_witness(&c, &p, 2, 3));
    }

    #[test]
    fn theorem2_classify_examples() {
        let p = Params::new(2, 2).unwrap();

        // X = (0, 0, 2): gain cell (2, 0), single witness set {1, 2}, no loss.
        let flags = theorem2::classify(&config(&[3, 3], &[1, 2], &p), &p, 2);
        assert_eq!(flags.gain_cell, Some((2, 0)));
        assert_eq!(flags.witness_sets, vec![vec![1, 2]]);
        assert!(!flags.in_loss_set);
        assert!(!flags.at_least_r_before);
        assert!(flags.at_least_r_after);

        // X = (1, 0, 1): loss cell (2, 0) through the r-1 singleton branch.
        let flags = theorem2::classify(&config(&[3, 1], &[1, 2], &p), &p, 2);
        assert_eq!(flags.first_nonlonely, 2);
        assert!(flags.in_loss_set);
        assert_eq!(flags.loss_cell, Some((2, 0)));
        assert_eq!(flags.gain_cell, None);

        // X = (2, 0, 0): nothing fires.
        let flags = theorem2::classify(&config(&[1, 1], &[1, 1], &p), &p, 2);
        assert!(!flags.at_least_r_before);
        assert!(!flags.in_loss_set);
        assert_eq!(flags.gain_cell, None);
        assert_eq!(flags.loss_cell, None);
    }

    #[test]
    fn theorem2_raw_predicates_on_examples() {
        let p = Params::new(2, 2).unwrap();
        let gain = config(&[3, 3], &[1, 2], &p);
        assert!(theorem2::in_gain_cell(&gain, &p, 2, 2, 0));
        assert!(!theorem2::in_gain_cell(&gain, &p, 2, 2, 1));
        assert!(theorem2::in_gain_witness(&gain, &p, 2, 2, 0, &[1, 2]));
        assert!(!theorem2::in_gain_witness(&gain, &p, 2, 2, 0, &[1]));

        let loss = config(&[3, 1], &[1, 2], &p);
        assert!(theorem2::in_loss_set(&loss, &p, 2));
        assert!(theorem2::in_loss_cell(&loss, &p, 2, 2, 0));
        assert!(!theorem2::in_loss_cell(&loss, &p, 2, 2, 1));
    }

    #[test]
    fn cell_index_set_examples() {
        assert_eq!(theorem2::cell_index_set(2, 2), vec![(2, 0), (2, 1)]);
        assert_eq!(
            theorem2::cell_index_set(3, 2),
            vec![(2, 0), (2, 1), (3, 0), (3, 1)]
        );
        // r - l must stay positive: (2, 2) is excluded for r = 2.
        assert!(!theorem2::cell_index_set(2, 2).contains(&(2, 2)));
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn cell_index_set_rejects_r_one() {
        theorem2::cell_index_set(3, 1);
    }

    #[test]
    fn flag_invariants_hold_exhaustively() {
        // Structural invariants of the records: a loss cell implies lonely
        // before and not after; witnesses appear exactly with their cover.
        for (n, k) in [(2u32, 1u32), (2, 2), (3, 2), (4, 2)] {
            let p = Params::new(n, k).unwrap();
            for c in crate::model::enumerate_configurations(&p, 1 << 20).unwrap() {
                let f1 = theorem1::classify(&c, &p);
                if f1.loss_cell.is_some() {
                    assert!(f1.lonely_before && !f1.lonely_after, "{c:?}");
                }
                assert_eq!(f1.gain_cover.is_some(), !f1.gain_witnesses.is_empty());
                for r in 2..=n {
                    let f2 = theorem2::classify(&c, &p, r);
                    assert_eq!(f2.in_loss_set, f2.loss_cell.is_some());
                    assert_eq!(f2.gain_cell.is_some(), !f2.witness_sets.is_empty());
                    if let Some(cell) = f2.gain_cell {
                        assert!(
                            theorem2::cell_index_set(n, r).contains(&cell),
                            "gain cell {cell:?} outside the index set"
                        );
                    }
                }
            }
        }
    }
}
