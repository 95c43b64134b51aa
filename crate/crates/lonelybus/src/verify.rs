//! Constructive maps of the coupling proofs and the exhaustive verifiers.
//!
//! Both proofs hinge on counting maps between event families:
//!
//! - Theorem 1 pairs each loss-cell configuration with a (witness
//!   configuration, passenger) pair: [`bijection_forward`] moves all but one
//!   extra-bus rider onto bus `Y_1`, [`bijection_backward`] undoes it. The
//!   bijection proves `P(loss cell m) = m * P(witness cell (m, 1))`.
//! - Theorem 2 expands each pinned-witness configuration into
//!   `m!/(m+l-r)!` loss-cell configurations ([`association_expand`]) with a
//!   partial inverse ([`association_invert`]); injectivity across sources
//!   gives `P(loss cell) >= (m!/(m+l-r)!) * P(witness cell)`.
//!
//! [`verify_theorem1`] and [`verify_theorem2`] enumerate every configuration,
//! tally every event family from the raw predicate definitions, exercise the
//! maps on every member configuration, and emit a [`VerificationReport`]
//! whose claims are decided on exact rationals. The enumeration may be
//! partitioned across workers; per-event counters combine by addition and
//! counterexamples keep the lexicographically first violator, so reports are
//! identical for every worker count.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::comb::falling_factorial;
use crate::events::{theorem1, theorem2};
use crate::model::{self, Configuration, Params};
use crate::{dist, Error, Result};

/// Enumeration budget and parallelism for the exhaustive verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// Hard cap on the number of configurations an instance may require.
    pub max_configurations: u64,
    /// Number of contiguous-range workers; results do not depend on it.
    pub workers: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            max_configurations: 100_000_000,
            workers: 1,
        }
    }
}

/// Comparison a claim requires between its exact left and right sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// One verified claim: exact sides, the required relation, and the verdict.
/// Pointwise (set-membership) claims count violations on the left against a
/// right side of zero and carry the first violating configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: String,
    pub lhs: BigRational,
    pub relation: Relation,
    pub rhs: BigRational,
    pub holds: bool,
    pub counterexample: Option<Configuration>,
}

impl Claim {
    fn new(
        name: String,
        lhs: BigRational,
        relation: Relation,
        rhs: BigRational,
        counterexample: Option<Configuration>,
    ) -> Self {
        let holds = relation.holds(&lhs, &rhs);
        Self {
            name,
            lhs,
            relation,
            rhs,
            holds,
            counterexample: if holds { None } else { counterexample },
        }
    }
}

/// Exact, claim-by-claim outcome of one exhaustive verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub n: u32,
    pub k: u32,
    /// Lonely-count threshold; `None` for the existence theorem.
    pub r: Option<u32>,
    /// Cells with `m` beyond this bound are empty and omitted.
    pub truncation_max_m: u32,
    pub total_configurations: u64,
    pub claims: Vec<Claim>,
    /// Association expansions whose leftover group had size exactly one.
    pub expansions_single_leftover: u64,
    /// Association expansions whose leftover group had some other size.
    pub expansions_other_leftover: u64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }

    pub fn failed_claims(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.holds)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

// ---------------------------------------------------------------------------
// Constructive maps
// ---------------------------------------------------------------------------

/// Theorem 1 forward map: `sigma` must sit in witness cell `(m, 1)` (gain
/// cover with `Y_1` empty) and `keep` must ride the extra bus. Every rider
/// except `keep` moves to bus `Y_1`; the image lies in loss cell `m`.
pub fn bijection_forward(
    sigma: &Configuration,
    keep: u32,
    params: &Params,
) -> Result<Configuration> {
    let flags = theorem1::classify(sigma, params);
    let m = flags.gain_cover.ok_or_else(|| {
        Error::Contract("bijection_forward: configuration is not in any gain-cover cell".into())
    })?;
    if !flags.gain_witnesses.contains(&1) {
        return Err(Error::Contract(format!(
            "bijection_forward: configuration is in gain cover {m} but bus Y_1 is not empty"
        )));
    }
    let extra = params.extra_bus();
    let pos = (keep as usize)
        .checked_sub(1)
        .filter(|&p| p < sigma.assignment().len())
        .ok_or_else(|| {
            Error::Contract(format!("bijection_forward: no passenger {keep}"))
        })?;
    if sigma.assignment()[pos] != extra {
        return Err(Error::Contract(format!(
            "bijection_forward: passenger {keep} does not ride the extra bus"
        )));
    }
    let y1 = sigma.target(1);
    let assignment = sigma
        .assignment()
        .iter()
        .enumerate()
        .map(|(p, &bus)| {
            if bus == extra && p != pos {
                y1
            } else {
                bus
            }
        })
        .collect();
    Ok(Configuration::from_parts_unchecked(
        assignment,
        sigma.targets().to_vec(),
    ))
}

/// Theorem 1 backward map: `tau` must sit in some loss cell `m`. All
/// passengers on bus `Y_1` move to the extra bus; returns the source
/// configuration together with the passenger who stayed.
pub fn bijection_backward(tau: &Configuration, params: &Params) -> Result<(Configuration, u32)> {
    let flags = theorem1::classify(tau, params);
    if flags.loss_cell.is_none() {
        return Err(Error::Contract(
            "bijection_backward: configuration is not in any loss cell".into(),
        ));
    }
    let extra = params.extra_bus();
    let y1 = tau.target(1);
    let keep = tau
        .assignment()
        .iter()
        .position(|&bus| bus == extra)
        .map(|p| p as u32 + 1)
        .expect("loss cell requires an extra-bus rider");
    let assignment = tau
        .assignment()
        .iter()
        .map(|&bus| if bus == y1 { extra } else { bus })
        .collect();
    Ok((
        Configuration::from_parts_unchecked(assignment, tau.targets().to_vec()),
        keep,
    ))
}

/// Witness index set `{1, ..., r-l}` pinning the canonical gain-witness cell.
fn leading_witnesses(r: u32, l: u32) -> Vec<u32> {
    (1..=r - l).collect()
}

/// Theorem 2 association map. `sigma` must sit in the gain-witness cell
/// `(m, l)` pinned by `{1, ..., r-l}`. Of its `m` extra-bus riders, one
/// stays, one lands on each bus `Y_1, ..., Y_{r-l-1}`, and the remaining
/// `m+l-r` land together on bus `Y_{r-l}`; all `m!/(m+l-r)!` choices are
/// returned, sorted lexicographically. Every image lies in loss cell `(m, l)`.
pub fn association_expand(
    sigma: &Configuration,
    m: u32,
    l: u32,
    r: u32,
    params: &Params,
) -> Result<Vec<Configuration>> {
    let witness = leading_witnesses(r, l);
    if !theorem2::in_gain_witness(sigma, params, r, m, l, &witness) {
        return Err(Error::Contract(format!(
            "association_expand: configuration is not in gain-witness cell \
             (m={m}, l={l}) pinned by the first {} targets",
            r - l
        )));
    }
    let extra = params.extra_bus();
    let riders: Vec<usize> = sigma
        .assignment()
        .iter()
        .enumerate()
        .filter(|(_, &bus)| bus == extra)
        .map(|(p, _)| p)
        .collect();
    debug_assert_eq!(riders.len(), m as usize);
    let slots = (r - l - 1) as usize;
    let last_bus = sigma.target(r - l);

    let mut images = Vec::new();
    for &stay in &riders {
        let others: Vec<usize> = riders.iter().copied().filter(|&p| p != stay).collect();
        for placed in others.iter().copied().permutations(slots) {
            let mut assignment = sigma.assignment().to_vec();
            for (slot, &p) in placed.iter().enumerate() {
                assignment[p] = sigma.target(slot as u32 + 1);
            }
            for &p in &others {
                if !placed.contains(&p) {
                    assignment[p] = last_bus;
                }
            }
            images.push(Configuration::from_parts_unchecked(
                assignment,
                sigma.targets().to_vec(),
            ));
        }
    }
    images.sort();
    debug_assert!(
        images.windows(2).all(|w| w[0] != w[1]),
        "association images must be distinct"
    );
    Ok(images)
}

/// Partial inverse of [`association_expand`]: moves every passenger riding
/// one of the buses `Y_1, ..., Y_{r-l}` (in `tau`) to the extra bus, and
/// returns the source iff it lies in the pinned gain-witness cell and `tau`
/// is among its expansion images.
pub fn association_invert(
    tau: &Configuration,
    m: u32,
    l: u32,
    r: u32,
    params: &Params,
) -> Option<Configuration> {
    if m < 2 || l >= r || r - l > m {
        return None;
    }
    let extra = params.extra_bus();
    let pulled: Vec<u32> = (1..=r - l).map(|j| tau.target(j)).collect();
    let assignment = tau
        .assignment()
        .iter()
        .map(|&bus| if pulled.contains(&bus) { extra } else { bus })
        .collect();
    let sigma = Configuration::from_parts_unchecked(assignment, tau.targets().to_vec());
    let witness = leading_witnesses(r, l);
    if !theorem2::in_gain_witness(&sigma, params, r, m, l, &witness) {
        return None;
    }
    let images = association_expand(&sigma, m, l, r, params).ok()?;
    images.binary_search(tau).ok().map(|_| sigma)
}

// ---------------------------------------------------------------------------
// Tally plumbing
// ---------------------------------------------------------------------------

/// Violation counter keeping the lexicographically first offender.
#[derive(Debug, Clone, Default)]
struct Violation {
    count: u64,
    first: Option<Configuration>,
}

impl Violation {
    fn record(&mut self, config: &Configuration) {
        if self.first.is_none() {
            self.first = Some(config.clone());
        }
        self.count += 1;
    }

    fn absorb(&mut self, other: Violation) {
        // Workers cover ascending ranges and merge in order, so the first
        // surviving counterexample is the global lexicographic first.
        if self.first.is_none() {
            self.first = other.first;
        }
        self.count += other.count;
    }
}

/// Runs `observe` over every configuration, partitioned into contiguous
/// lexicographic ranges across `workers` threads, merging tallies in range
/// order.
fn tally_partitioned<T, New, Obs>(
    params: &Params,
    total: u64,
    workers: usize,
    new: New,
    observe: Obs,
    merge: fn(T, T) -> T,
) -> T
where
    T: Send,
    New: Fn() -> T + Sync,
    Obs: Fn(&mut T, &Configuration) + Sync,
{
    let workers = workers.max(1).min(total.max(1) as usize);
    if workers == 1 {
        let mut tally = new();
        model::for_each_in_range(params, 0, total, |_, c| observe(&mut tally, c));
        return tally;
    }
    let chunk = total / workers as u64;
    let remainder = total % workers as u64;
    let mut results: Vec<Option<T>> = (0..workers).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, slot) in results.iter_mut().enumerate() {
            let w = w as u64;
            let start = w * chunk + w.min(remainder);
            let end = start + chunk + u64::from(w < remainder);
            let new = &new;
            let observe = &observe;
            scope.spawn(move || {
                let mut tally = new();
                model::for_each_in_range(params, start, end, |_, c| observe(&mut tally, c));
                *slot = Some(tally);
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("worker finished"))
        .reduce(merge)
        .expect("at least one worker")
}

fn count_ratio(count: u64, total: u64) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(total))
}

fn int_ratio(value: u64) -> BigRational {
    BigRational::from(BigInt::from(value))
}

fn biguint_ratio(value: &BigUint) -> BigRational {
    BigRational::from(BigInt::from(value.clone()))
}

/// Pointwise claim: a violation count that must equal zero, carrying the
/// first violating configuration when it does not.
fn push_zero_claim(claims: &mut Vec<Claim>, name: String, v: &Violation) {
    claims.push(Claim::new(
        name,
        int_ratio(v.count),
        Relation::Eq,
        int_ratio(0),
        v.first.clone(),
    ));
}

// ---------------------------------------------------------------------------
// Theorem 1 verifier
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct TallyT1 {
    lonely_before: u64,
    lonely_after: u64,
    loss_side: u64,
    gain_side: u64,
    /// Indexed by cell `m` (slots `0..2` unused).
    loss_cell: Vec<u64>,
    gain_cover: Vec<u64>,
    gain_side_slice: Vec<u64>,
    /// `[m][i-1]`: witness cell counts.
    gain_witness: Vec<Vec<u64>>,
    forward_images: Vec<u64>,
    classifier_mismatch: Violation,
    loss_cell_overlap: Violation,
    loss_cell_outside: Vec<Violation>,
    gain_slice_uncovered: Vec<Violation>,
    witness_union_gap: Vec<Violation>,
    forward_image_bad: Vec<Violation>,
    roundtrip_bad: Vec<Violation>,
}

impl TallyT1 {
    fn new(n: u32) -> Self {
        let cells = n as usize + 1;
        Self {
            lonely_before: 0,
            lonely_after: 0,
            loss_side: 0,
            gain_side: 0,
            loss_cell: vec![0; cells],
            gain_cover: vec![0; cells],
            gain_side_slice: vec![0; cells],
            gain_witness: (0..cells).map(|m| vec![0; m]).collect(),
            forward_images: vec![0; cells],
            classifier_mismatch: Violation::default(),
            loss_cell_overlap: Violation::default(),
            loss_cell_outside: vec![Violation::default(); cells],
            gain_slice_uncovered: vec![Violation::default(); cells],
            witness_union_gap: vec![Violation::default(); cells],
            forward_image_bad: vec![Violation::default(); cells],
            roundtrip_bad: vec![Violation::default(); cells],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.lonely_before += other.lonely_before;
        self.lonely_after += other.lonely_after;
        self.loss_side += other.loss_side;
        self.gain_side += other.gain_side;
        for (a, b) in self.loss_cell.iter_mut().zip(other.loss_cell) {
            *a += b;
        }
        for (a, b) in self.gain_cover.iter_mut().zip(other.gain_cover) {
            *a += b;
        }
        for (a, b) in self.gain_side_slice.iter_mut().zip(other.gain_side_slice) {
            *a += b;
        }
        for (row, other_row) in self.gain_witness.iter_mut().zip(other.gain_witness) {
            for (a, b) in row.iter_mut().zip(other_row) {
                *a += b;
            }
        }
        for (a, b) in self.forward_images.iter_mut().zip(other.forward_images) {
            *a += b;
        }
        self.classifier_mismatch.absorb(other.classifier_mismatch);
        self.loss_cell_overlap.absorb(other.loss_cell_overlap);
        for (a, b) in self.loss_cell_outside.iter_mut().zip(other.loss_cell_outside) {
            a.absorb(b);
        }
        for (a, b) in self
            .gain_slice_uncovered
            .iter_mut()
            .zip(other.gain_slice_uncovered)
        {
            a.absorb(b);
        }
        for (a, b) in self.witness_union_gap.iter_mut().zip(other.witness_union_gap) {
            a.absorb(b);
        }
        for (a, b) in self.forward_image_bad.iter_mut().zip(other.forward_image_bad) {
            a.absorb(b);
        }
        for (a, b) in self.roundtrip_bad.iter_mut().zip(other.roundtrip_bad) {
            a.absorb(b);
        }
        self
    }

    fn observe(&mut self, config: &Configuration, params: &Params) {
        let n = params.n();
        let x = config.occupancy(params);
        let (_, after) = config.reassign(params);
        let flags = theorem1::classify_given(&x, &after, config, params);

        if flags.lonely_before {
            self.lonely_before += 1;
        }
        if flags.lonely_after {
            self.lonely_after += 1;
        }
        let lost = flags.lonely_before && !flags.lonely_after;
        let gained = flags.lonely_after && !flags.lonely_before;
        if lost {
            self.loss_side += 1;
        }
        if gained {
            self.gain_side += 1;
        }

        // Raw per-cell scan; the classifier must agree with it.
        let mut raw_loss = None;
        let mut raw_gain = None;
        for m in 2..=n {
            if theorem1::in_loss_cell_given(&x, config, params, m) {
                if raw_loss.replace(m).is_some() {
                    self.loss_cell_overlap.record(config);
                }
                self.loss_cell[m as usize] += 1;
                if !lost {
                    self.loss_cell_outside[m as usize].record(config);
                }
            }
            if theorem1::in_gain_cover_given(&x, config, params, m) {
                raw_gain = Some(m);
                self.gain_cover[m as usize] += 1;
                let mut any_witness = false;
                for i in 1..=m {
                    if theorem1::in_gain_witness_given(&x, config, params, m, i) {
                        self.gain_witness[m as usize][(i - 1) as usize] += 1;
                        any_witness = true;
                    }
                }
                if !any_witness {
                    self.witness_union_gap[m as usize].record(config);
                }
            }
        }
        if raw_loss != flags.loss_cell || raw_gain != flags.gain_cover {
            self.classifier_mismatch.record(config);
        }
        if gained {
            let m = x.load(params.extra_bus());
            if (2..=n).contains(&m) {
                self.gain_side_slice[m as usize] += 1;
                if raw_gain != Some(m) {
                    self.gain_slice_uncovered[m as usize].record(config);
                }
            } else {
                // Gaining loneliness without at least two reassigned
                // passengers is impossible; surface it as a coverage gap.
                self.gain_slice_uncovered[2].record(config);
            }
        }

        // Exercise the bijection from both ends.
        if let Some(m) = raw_gain {
            if flags.gain_witnesses.contains(&1) {
                let extra = params.extra_bus();
                for (pos, &bus) in config.assignment().iter().enumerate() {
                    if bus != extra {
                        continue;
                    }
                    let keep = pos as u32 + 1;
                    match bijection_forward(config, keep, params) {
                        Ok(image) => {
                            self.forward_images[m as usize] += 1;
                            if !theorem1::in_loss_cell(&image, params, m) {
                                self.forward_image_bad[m as usize].record(&image);
                            }
                            match bijection_backward(&image, params) {
                                Ok((back, kept)) if back == *config && kept == keep => {}
                                _ => self.roundtrip_bad[m as usize].record(config),
                            }
                        }
                        Err(_) => self.roundtrip_bad[m as usize].record(config),
                    }
                }
            }
        }
        if let Some(m) = raw_loss {
            match bijection_backward(config, params) {
                Ok((source, keep)) => {
                    let ok = theorem1::in_gain_witness(&source, params, m, 1)
                        && bijection_forward(&source, keep, params)
                            .map(|image| image == *config)
                            .unwrap_or(false);
                    if !ok {
                        self.roundtrip_bad[m as usize].record(config);
                    }
                }
                Err(_) => self.roundtrip_bad[m as usize].record(config),
            }
        }
    }
}

/// Exhaustively verifies every event-level claim behind the existence
/// theorem at `(n, k)`: cell disjointness and inclusions, witness
/// equiprobability, the counting bijection, the strict headline inequality,
/// and cross-checks against the DP tails.
pub fn verify_theorem1(params: &Params, opts: &EnumOptions) -> Result<VerificationReport> {
    let total = model::checked_count(params, opts.max_configurations)?;
    let (n, k) = (params.n(), params.k());

    let tally = tally_partitioned(
        params,
        total,
        opts.workers,
        || TallyT1::new(n),
        |tally, config| tally.observe(config, params),
        TallyT1::merge,
    );

    let p = |count: u64| count_ratio(count, total);
    let mut claims = Vec::new();

    push_zero_claim(
        &mut claims,
        "classifier_consistent_with_raw_events".into(),
        &tally.classifier_mismatch,
    );
    push_zero_claim(
        &mut claims,
        "loss_cells_pairwise_disjoint".into(),
        &tally.loss_cell_overlap,
    );
    for m in 2..=n {
        push_zero_claim(
            &mut claims,
            format!("loss_cell_within_loss_side[m={m}]"),
            &tally.loss_cell_outside[m as usize],
        );
    }
    let loss_cells_total: u64 = tally.loss_cell.iter().sum();
    claims.push(Claim::new(
        "loss_cells_total_le_loss_side".into(),
        p(loss_cells_total),
        Relation::Le,
        p(tally.loss_side),
        None,
    ));
    for m in 2..=n {
        push_zero_claim(
            &mut claims,
            format!("gain_side_slice_within_gain_cover[m={m}]"),
            &tally.gain_slice_uncovered[m as usize],
        );
    }
    let gain_cover_total: u64 = tally.gain_cover.iter().sum();
    claims.push(Claim::new(
        "gain_side_lt_gain_cover_total".into(),
        p(tally.gain_side),
        Relation::Lt,
        p(gain_cover_total),
        None,
    ));
    claims.push(Claim::new(
        "gain_cover_strict_at_full_load".into(),
        p(tally.gain_cover[n as usize]),
        Relation::Gt,
        p(tally.gain_side_slice[n as usize]),
        None,
    ));
    for m in 2..=n {
        let row = &tally.gain_witness[m as usize];
        for i in 2..=m {
            claims.push(Claim::new(
                format!("gain_witness_equiprobable[m={m},i={i}]"),
                p(row[(i - 1) as usize]),
                Relation::Eq,
                p(row[0]),
                None,
            ));
        }
        push_zero_claim(
            &mut claims,
            format!("gain_cover_eq_union_of_witnesses[m={m}]"),
            &tally.witness_union_gap[m as usize],
        );
        claims.push(Claim::new(
            format!("gain_cover_le_m_times_witness[m={m}]"),
            p(tally.gain_cover[m as usize]),
            Relation::Le,
            int_ratio(m as u64) * p(row[0]),
            None,
        ));
        claims.push(Claim::new(
            format!("loss_cell_eq_m_times_witness[m={m}]"),
            p(tally.loss_cell[m as usize]),
            Relation::Eq,
            int_ratio(m as u64) * p(row[0]),
            None,
        ));
        push_zero_claim(
            &mut claims,
            format!("bijection_forward_images_in_loss_cell[m={m}]"),
            &tally.forward_image_bad[m as usize],
        );
        push_zero_claim(
            &mut claims,
            format!("bijection_roundtrip[m={m}]"),
            &tally.roundtrip_bad[m as usize],
        );
        claims.push(Claim::new(
            format!("bijection_image_count_matches_loss_cell[m={m}]"),
            int_ratio(tally.forward_images[m as usize]),
            Relation::Eq,
            int_ratio(tally.loss_cell[m as usize]),
            None,
        ));
    }
    claims.push(Claim::new(
        "loss_side_gt_gain_side".into(),
        p(tally.loss_side),
        Relation::Gt,
        p(tally.gain_side),
        None,
    ));
    let before_tail = dist::tail_prob(&Params::new(n, k + 1)?, 1)?.into_ratio();
    let after_tail = dist::tail_prob(params, 1)?.into_ratio();
    claims.push(Claim::new(
        "headline_gap_matches_tail_difference".into(),
        p(tally.loss_side) - p(tally.gain_side),
        Relation::Eq,
        &before_tail - &after_tail,
        None,
    ));
    claims.push(Claim::new(
        "lonely_before_matches_tail".into(),
        p(tally.lonely_before),
        Relation::Eq,
        before_tail,
        None,
    ));
    claims.push(Claim::new(
        "lonely_after_matches_tail".into(),
        p(tally.lonely_after),
        Relation::Eq,
        after_tail,
        None,
    ));

    Ok(VerificationReport {
        n,
        k,
        r: None,
        truncation_max_m: n,
        total_configurations: total,
        claims,
        expansions_single_leftover: 0,
        expansions_other_leftover: 0,
    })
}

// ---------------------------------------------------------------------------
// Theorem 2 verifier
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct TallyT2 {
    at_least_r_before: u64,
    at_least_r_after: u64,
    loss_side: u64,
    gain_side: u64,
    /// Per cell-index counters, aligned with the cell index set.
    gain_cell: Vec<u64>,
    witness_counts: Vec<BTreeMap<Vec<u32>, u64>>,
    loss_set: u64,
    loss_cell: Vec<u64>,
    expansion_sources: Vec<u64>,
    expansion_images: Vec<u64>,
    single_leftover: u64,
    other_leftover: u64,
    classifier_mismatch: Violation,
    gain_cell_overlap: Violation,
    gain_side_uncovered: Violation,
    witness_union_gap: Vec<Violation>,
    loss_outside_loss_side: Violation,
    loss_cell_partition_bad: Violation,
    expansion_size_bad: Vec<Violation>,
    expansion_image_bad: Vec<Violation>,
    inversion_bad: Vec<Violation>,
}

impl TallyT2 {
    fn new(cells: usize) -> Self {
        Self {
            at_least_r_before: 0,
            at_least_r_after: 0,
            loss_side: 0,
            gain_side: 0,
            gain_cell: vec![0; cells],
            witness_counts: vec![BTreeMap::new(); cells],
            loss_set: 0,
            loss_cell: vec![0; cells],
            expansion_sources: vec![0; cells],
            expansion_images: vec![0; cells],
            single_leftover: 0,
            other_leftover: 0,
            classifier_mismatch: Violation::default(),
            gain_cell_overlap: Violation::default(),
            gain_side_uncovered: Violation::default(),
            witness_union_gap: vec![Violation::default(); cells],
            loss_outside_loss_side: Violation::default(),
            loss_cell_partition_bad: Violation::default(),
            expansion_size_bad: vec![Violation::default(); cells],
            expansion_image_bad: vec![Violation::default(); cells],
            inversion_bad: vec![Violation::default(); cells],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.at_least_r_before += other.at_least_r_before;
        self.at_least_r_after += other.at_least_r_after;
        self.loss_side += other.loss_side;
        self.gain_side += other.gain_side;
        for (a, b) in self.gain_cell.iter_mut().zip(other.gain_cell) {
            *a += b;
        }
        for (map, other_map) in self.witness_counts.iter_mut().zip(other.witness_counts) {
            for (key, count) in other_map {
                *map.entry(key).or_insert(0) += count;
            }
        }
        self.loss_set += other.loss_set;
        for (a, b) in self.loss_cell.iter_mut().zip(other.loss_cell) {
            *a += b;
        }
        for (a, b) in self.expansion_sources.iter_mut().zip(other.expansion_sources) {
            *a += b;
        }
        for (a, b) in self.expansion_images.iter_mut().zip(other.expansion_images) {
            *a += b;
        }
        self.single_leftover += other.single_leftover;
        self.other_leftover += other.other_leftover;
        self.classifier_mismatch.absorb(other.classifier_mismatch);
        self.gain_cell_overlap.absorb(other.gain_cell_overlap);
        self.gain_side_uncovered.absorb(other.gain_side_uncovered);
        for (a, b) in self.witness_union_gap.iter_mut().zip(other.witness_union_gap) {
            a.absorb(b);
        }
        self.loss_outside_loss_side
            .absorb(other.loss_outside_loss_side);
        self.loss_cell_partition_bad
            .absorb(other.loss_cell_partition_bad);
        for (a, b) in self.expansion_size_bad.iter_mut().zip(other.expansion_size_bad) {
            a.absorb(b);
        }
        for (a, b) in self.expansion_image_bad.iter_mut().zip(other.expansion_image_bad) {
            a.absorb(b);
        }
        for (a, b) in self.inversion_bad.iter_mut().zip(other.inversion_bad) {
            a.absorb(b);
        }
        self
    }

    fn observe(&mut self, config: &Configuration, params: &Params, r: u32, cells: &[(u32, u32)]) {
        let x = config.occupancy(params);
        let (_, after) = config.reassign(params);
        let flags = theorem2::classify_given(&x, &after, config, params, r);

        if flags.at_least_r_before {
            self.at_least_r_before += 1;
        }
        if flags.at_least_r_after {
            self.at_least_r_after += 1;
        }
        let lost = flags.at_least_r_before && !flags.at_least_r_after;
        let gained = flags.at_least_r_after && !flags.at_least_r_before;
        if lost {
            self.loss_side += 1;
        }
        if gained {
            self.gain_side += 1;
        }

        // Raw gain-cell scan over the whole index set.
        let mut raw_gain = None;
        for (ci, &(m, l)) in cells.iter().enumerate() {
            if theorem2::in_gain_cell_given(&x, config, params, r, m, l) {
                if raw_gain.replace((m, l)).is_some() {
                    self.gain_cell_overlap.record(config);
                }
                self.gain_cell[ci] += 1;
                // Tally every witness set straight from the raw predicate.
                let mut any = false;
                for s in (1..=m).combinations((r - l) as usize) {
                    if theorem2::in_gain_witness_given(&x, config, params, r, m, l, &s) {
                        *self.witness_counts[ci].entry(s).or_insert(0) += 1;
                        any = true;
                    }
                }
                if !any {
                    self.witness_union_gap[ci].record(config);
                }
            }
        }
        if raw_gain != flags.gain_cell {
            self.classifier_mismatch.record(config);
        }
        if gained && raw_gain.is_none() {
            self.gain_side_uncovered.record(config);
        }

        // Raw loss-set and loss-cell scan.
        let in_loss = theorem2::in_loss_set_given(&x, config, params, r);
        if in_loss != flags.in_loss_set {
            self.classifier_mismatch.record(config);
        }
        if in_loss {
            self.loss_set += 1;
            if !lost {
                self.loss_outside_loss_side.record(config);
            }
            let mut memberships = 0;
            for (ci, &(m, l)) in cells.iter().enumerate() {
                if theorem2::in_loss_cell_given(&x, config, params, r, m, l) {
                    memberships += 1;
                    self.loss_cell[ci] += 1;
                    if flags.loss_cell != Some((m, l)) {
                        self.classifier_mismatch.record(config);
                    }
                }
            }
            if memberships != 1 {
                self.loss_cell_partition_bad.record(config);
            }
        }

        // Exercise the association map on every pinned-witness source.
        if let Some((m, l)) = raw_gain {
            let witness = leading_witnesses(r, l);
            if theorem2::in_gain_witness_given(&x, config, params, r, m, l, &witness) {
                let ci = cells
                    .iter()
                    .position(|&c| c == (m, l))
                    .expect("raw gain cell is in the index set");
                self.expansion_sources[ci] += 1;
                if m + l - r == 1 {
                    self.single_leftover += 1;
                } else {
                    self.other_leftover += 1;
                }
                match association_expand(config, m, l, r, params) {
                    Ok(images) => {
                        let expected = falling_factorial(m as u64, (r - l) as u64);
                        let distinct = images.windows(2).all(|w| w[0] != w[1]);
                        if expected.to_u64() != Some(images.len() as u64) || !distinct {
                            self.expansion_size_bad[ci].record(config);
                        }
                        self.expansion_images[ci] += images.len() as u64;
                        for image in &images {
                            if !theorem2::in_loss_cell(image, params, r, m, l) {
                                self.expansion_image_bad[ci].record(image);
                            }
                            match association_invert(image, m, l, r, params) {
                                Some(source) if source == *config => {}
                                _ => self.inversion_bad[ci].record(image),
                            }
                        }
                    }
                    Err(_) => self.expansion_size_bad[ci].record(config),
                }
            }
        }
    }
}

/// Exhaustively verifies every event-level claim behind the dominance
/// theorem at `(n, k)` and threshold `r >= 2`: gain-cell disjointness and
/// coverage, witness-set equiprobability, the loss-cell partition, the
/// association map's cardinality, image, and injectivity claims, the
/// headline inequality, and cross-checks against the DP tails.
pub fn verify_theorem2(params: &Params, r: u32, opts: &EnumOptions) -> Result<VerificationReport> {
    let (n, k) = (params.n(), params.k());
    if !(2..=n).contains(&r) {
        return Err(Error::InvalidInput(format!(
            "theorem 2 threshold r={r} must lie in 2..={n}"
        )));
    }
    let total = model::checked_count(params, opts.max_configurations)?;
    let cells = theorem2::cell_index_set(n, r);

    let tally = tally_partitioned(
        params,
        total,
        opts.workers,
        || TallyT2::new(cells.len()),
        |tally, config| tally.observe(config, params, r, &cells),
        TallyT2::merge,
    );

    let p = |count: u64| count_ratio(count, total);
    let mut claims = Vec::new();

    push_zero_claim(
        &mut claims,
        "classifier_consistent_with_raw_events".into(),
        &tally.classifier_mismatch,
    );
    push_zero_claim(
        &mut claims,
        "gain_cells_pairwise_disjoint".into(),
        &tally.gain_cell_overlap,
    );
    push_zero_claim(
        &mut claims,
        "gain_side_covered_by_gain_cells".into(),
        &tally.gain_side_uncovered,
    );
    let gain_cells_total: u64 = tally.gain_cell.iter().sum();
    claims.push(Claim::new(
        "gain_side_le_gain_cells_total".into(),
        p(tally.gain_side),
        Relation::Le,
        p(gain_cells_total),
        None,
    ));

    let mut pascal = crate::comb::Pascal::new();
    for (ci, &(m, l)) in cells.iter().enumerate() {
        let suffix = format!("[m={m},l={l}]");
        let witness = leading_witnesses(r, l);
        let pinned = tally.witness_counts[ci]
            .get(&witness)
            .copied()
            .unwrap_or(0);
        push_zero_claim(
            &mut claims,
            format!("gain_cell_eq_union_of_witness_sets{suffix}"),
            &tally.witness_union_gap[ci],
        );
        // Equiprobability over every witness set, absent ones counting zero.
        let mut min_count = u64::MAX;
        let mut max_count = 0u64;
        for s in (1..=m).combinations((r - l) as usize) {
            let count = tally.witness_counts[ci].get(&s).copied().unwrap_or(0);
            min_count = min_count.min(count);
            max_count = max_count.max(count);
        }
        claims.push(Claim::new(
            format!("gain_witnesses_equiprobable{suffix}"),
            p(max_count),
            Relation::Eq,
            p(min_count),
            None,
        ));
        let choose = pascal.choose(m as usize, (r - l) as usize);
        claims.push(Claim::new(
            format!("gain_cell_le_choose_times_witness{suffix}"),
            p(tally.gain_cell[ci]),
            Relation::Le,
            biguint_ratio(&choose) * p(pinned),
            None,
        ));
    }

    push_zero_claim(
        &mut claims,
        "loss_set_within_loss_side".into(),
        &tally.loss_outside_loss_side,
    );
    push_zero_claim(
        &mut claims,
        "loss_cells_partition_loss_set".into(),
        &tally.loss_cell_partition_bad,
    );
    let loss_cells_total: u64 = tally.loss_cell.iter().sum();
    claims.push(Claim::new(
        "loss_cells_total_eq_loss_set".into(),
        p(loss_cells_total),
        Relation::Eq,
        p(tally.loss_set),
        None,
    ));
    claims.push(Claim::new(
        "loss_side_ge_loss_set".into(),
        p(tally.loss_side),
        Relation::Ge,
        p(tally.loss_set),
        None,
    ));

    for (ci, &(m, l)) in cells.iter().enumerate() {
        let suffix = format!("[m={m},l={l}]");
        let witness = leading_witnesses(r, l);
        let pinned = tally.witness_counts[ci]
            .get(&witness)
            .copied()
            .unwrap_or(0);
        push_zero_claim(
            &mut claims,
            format!("association_expansion_size{suffix}"),
            &tally.expansion_size_bad[ci],
        );
        push_zero_claim(
            &mut claims,
            format!("association_images_in_loss_cell{suffix}"),
            &tally.expansion_image_bad[ci],
        );
        push_zero_claim(
            &mut claims,
            format!("association_roundtrip{suffix}"),
            &tally.inversion_bad[ci],
        );
        claims.push(Claim::new(
            format!("loss_cell_count_ge_association_images{suffix}"),
            int_ratio(tally.loss_cell[ci]),
            Relation::Ge,
            int_ratio(tally.expansion_images[ci]),
            None,
        ));
        let coefficient = falling_factorial(m as u64, (r - l) as u64);
        claims.push(Claim::new(
            format!("loss_cell_ge_coeff_times_witness{suffix}"),
            p(tally.loss_cell[ci]),
            Relation::Ge,
            biguint_ratio(&coefficient) * p(pinned),
            None,
        ));
    }

    claims.push(Claim::new(
        "loss_side_ge_gain_side".into(),
        p(tally.loss_side),
        Relation::Ge,
        p(tally.gain_side),
        None,
    ));
    let before_tail = dist::tail_prob(&Params::new(n, k + 1)?, r)?.into_ratio();
    let after_tail = dist::tail_prob(params, r)?.into_ratio();
    claims.push(Claim::new(
        "headline_gap_matches_tail_difference".into(),
        p(tally.loss_side) - p(tally.gain_side),
        Relation::Eq,
        &before_tail - &after_tail,
        None,
    ));
    claims.push(Claim::new(
        "at_least_r_before_matches_tail".into(),
        p(tally.at_least_r_before),
        Relation::Eq,
        before_tail,
        None,
    ));
    claims.push(Claim::new(
        "at_least_r_after_matches_tail".into(),
        p(tally.at_least_r_after),
        Relation::Eq,
        after_tail,
        None,
    ));

    Ok(VerificationReport {
        n,
        k,
        r: Some(r),
        truncation_max_m: n,
        total_configurations: total,
        claims,
        expansions_single_leftover: tally.single_leftover,
        expansions_other_leftover: tally.other_leftover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, k: u32) -> Params {
        Params::new(n, k).unwrap()
    }

    fn config(assignment: &[u32], targets: &[u32], p: &Params) -> Configuration {
        Configuration::new(assignment.to_vec(), targets.to_vec(), p).unwrap()
    }

    fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn bijection_forward_examples() {
        let p = params(2, 1);
        let sigma = config(&[2, 2], &[1, 1], &p);
        let tau = bijection_forward(&sigma, 2, &p).unwrap();
        assert_eq!(tau.assignment(), &[1, 2]);
        assert_eq!(tau.targets(), &[1, 1]);
        assert!(theorem1::in_loss_cell(&tau, &p, 2));

        let tau = bijection_forward(&sigma, 1, &p).unwrap();
        assert_eq!(tau.assignment(), &[2, 1]);

        let p = params(3, 2);
        let sigma = config(&[3, 3, 3], &[1, 1, 1], &p);
        let tau = bijection_forward(&sigma, 1, &p).unwrap();
        assert_eq!(tau.assignment(), &[3, 1, 1]);
        assert!(theorem1::in_loss_cell(&tau, &p, 3));
    }

    #[test]
    fn bijection_backward_examples() {
        let p = params(2, 1);
        let tau = config(&[1, 2], &[1, 1], &p);
        let (sigma, keep) = bijection_backward(&tau, &p).unwrap();
        assert_eq!(sigma.assignment(), &[2, 2]);
        assert_eq!(keep, 2);

        let p = params(3, 2);
        let tau = config(&[3, 1, 1], &[1, 1, 1], &p);
        let (sigma, keep) = bijection_backward(&tau, &p).unwrap();
        assert_eq!(sigma.assignment(), &[3, 3, 3]);
        assert_eq!(keep, 1);
    }

    #[test]
    fn bijection_contract_errors_name_failed_membership() {
        let p = params(2, 1);
        let not_witness = config(&[1, 1], &[1, 1], &p);
        let err = bijection_forward(&not_witness, 1, &p).unwrap_err();
        assert!(err.to_string().contains("gain-cover"), "{err}");

        let sigma = config(&[2, 2], &[1, 1], &p);
        let err = bijection_forward(&sigma, 3, &p).unwrap_err();
        assert!(err.to_string().contains("passenger 3"), "{err}");

        let err = bijection_backward(&not_witness, &p).unwrap_err();
        assert!(err.to_string().contains("loss cell"), "{err}");
    }

    #[test]
    fn bijection_round_trips_everywhere_small() {
        let p = params(3, 2);
        for c in model::enumerate_configurations(&p, 1 << 20).unwrap() {
            let flags = theorem1::classify(&c, &p);
            if flags.loss_cell.is_some() {
                let (sigma, keep) = bijection_backward(&c, &p).unwrap();
                assert_eq!(bijection_forward(&sigma, keep, &p).unwrap(), c);
            }
        }
    }

    #[test]
    fn association_expand_example() {
        let p = params(2, 2);
        let sigma = config(&[3, 3], &[1, 2], &p);
        let images = association_expand(&sigma, 2, 0, 2, &p).unwrap();
        assert_eq!(images.len(), 2);
        assert_eq!(images[0].assignment(), &[1, 3]);
        assert_eq!(images[1].assignment(), &[3, 1]);
        for image in &images {
            assert_eq!(image.targets(), &[1, 2]);
            assert!(theorem2::in_loss_cell(image, &p, 2, 2, 0));
        }
    }

    #[test]
    fn association_expand_rejects_outsiders() {
        let p = params(2, 2);
        let outsider = config(&[1, 1], &[1, 2], &p);
        let err = association_expand(&outsider, 2, 0, 2, &p).unwrap_err();
        assert!(err.to_string().contains("gain-witness"), "{err}");
    }

    #[test]
    fn association_invert_examples() {
        let p = params(2, 2);
        let tau = config(&[3, 1], &[1, 2], &p);
        let sigma = association_invert(&tau, 2, 0, 2, &p).unwrap();
        assert_eq!(sigma.assignment(), &[3, 3]);
        assert_eq!(sigma.targets(), &[1, 2]);

        // A configuration outside the loss cell inverts to nothing.
        let stray = config(&[1, 1], &[1, 2], &p);
        assert!(association_invert(&stray, 2, 0, 2, &p).is_none());
    }

    #[test]
    fn association_round_trips_everywhere_small() {
        // Exhaustive source/image round-trip including both leftover branches:
        // (2,2,2) expands with leftover 0, (3,3,2) with leftover 1, and
        // (4,3,2) with leftover 2.
        let mut single = 0u64;
        let mut other = 0u64;
        for (n, k, r) in [(2u32, 2u32, 2u32), (3, 3, 2), (4, 3, 2)] {
            let p = params(n, k);
            for sigma in model::enumerate_configurations(&p, 1 << 22).unwrap() {
                let flags = theorem2::classify(&sigma, &p, r);
                let Some((m, l)) = flags.gain_cell else {
                    continue;
                };
                let witness = leading_witnesses(r, l);
                if !flags.witness_sets.contains(&witness) {
                    continue;
                }
                if m + l - r == 1 {
                    single += 1;
                } else {
                    other += 1;
                }
                let images = association_expand(&sigma, m, l, r, &p).unwrap();
                let expected = falling_factorial(m as u64, (r - l) as u64);
                assert_eq!(BigUint::from(images.len()), expected);
                for tau in &images {
                    assert_eq!(
                        association_invert(tau, m, l, r, &p).as_ref(),
                        Some(&sigma),
                        "(n={n},k={k},r={r}) image failed to invert"
                    );
                }
            }
        }
        assert!(single > 0 && other > 0, "both leftover branches exercised");
    }

    #[test]
    fn theorem1_report_values_at_2_1() {
        let p = params(2, 1);
        let report = verify_theorem1(&p, &EnumOptions::default()).unwrap();
        assert!(report.all_pass(), "failed: {:?}", report.failed_claims().collect::<Vec<_>>());
        assert_eq!(report.total_configurations, 4);

        let claim = |name: &str| report.claim(name).unwrap();
        let headline = claim("loss_side_gt_gain_side");
        assert_eq!(headline.lhs, ratio(1, 2));
        assert_eq!(headline.rhs, ratio(0, 1));

        assert_eq!(claim("loss_cells_total_le_loss_side").lhs, ratio(1, 2));
        assert_eq!(claim("gain_side_lt_gain_cover_total").rhs, ratio(1, 4));
        let eq = claim("loss_cell_eq_m_times_witness[m=2]");
        assert_eq!(eq.lhs, ratio(1, 2));
        assert_eq!(eq.rhs, ratio(1, 2));
    }

    #[test]
    fn theorem1_report_values_at_2_2_and_3_2() {
        let report = verify_theorem1(&params(2, 2), &EnumOptions::default()).unwrap();
        assert!(report.all_pass());
        assert_eq!(
            report.claim("lonely_before_matches_tail").unwrap().lhs,
            ratio(2, 3)
        );
        assert_eq!(
            report.claim("lonely_after_matches_tail").unwrap().lhs,
            ratio(1, 2)
        );

        let report = verify_theorem1(&params(3, 2), &EnumOptions::default()).unwrap();
        assert!(report.all_pass());
        assert_eq!(
            report.claim("lonely_before_matches_tail").unwrap().lhs,
            ratio(8, 9)
        );
        assert_eq!(
            report.claim("lonely_after_matches_tail").unwrap().lhs,
            ratio(3, 4)
        );
    }

    #[test]
    fn theorem2_report_values() {
        let report = verify_theorem2(&params(2, 2), 2, &EnumOptions::default()).unwrap();
        assert!(report.all_pass(), "failed: {:?}", report.failed_claims().collect::<Vec<_>>());
        assert_eq!(report.total_configurations, 36);
        assert_eq!(
            report.claim("at_least_r_before_matches_tail").unwrap().lhs,
            ratio(2, 3)
        );
        assert_eq!(
            report.claim("at_least_r_after_matches_tail").unwrap().lhs,
            ratio(1, 2)
        );

        let report = verify_theorem2(&params(3, 2), 3, &EnumOptions::default()).unwrap();
        assert!(report.all_pass());
        assert_eq!(
            report.claim("at_least_r_before_matches_tail").unwrap().lhs,
            ratio(2, 9)
        );
        assert_eq!(
            report.claim("at_least_r_after_matches_tail").unwrap().lhs,
            ratio(0, 1)
        );

        // r = n with k = 1: the after side is trivially empty.
        let report = verify_theorem2(&params(3, 1), 3, &EnumOptions::default()).unwrap();
        assert!(report.all_pass());
        assert_eq!(
            report.claim("at_least_r_after_matches_tail").unwrap().lhs,
            ratio(0, 1)
        );
    }

    #[test]
    fn reports_do_not_depend_on_worker_count() {
        let p = params(3, 2);
        let base = verify_theorem1(&p, &EnumOptions::default()).unwrap();
        for workers in [2, 3, 5, 16] {
            let opts = EnumOptions {
                workers,
                ..EnumOptions::default()
            };
            assert_eq!(verify_theorem1(&p, &opts).unwrap(), base);
        }
        let base = verify_theorem2(&p, 2, &EnumOptions::default()).unwrap();
        for workers in [2, 7] {
            let opts = EnumOptions {
                workers,
                ..EnumOptions::default()
            };
            assert_eq!(verify_theorem2(&p, 2, &opts).unwrap(), base);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = params(3, 2);
        let opts = EnumOptions {
            max_configurations: 215,
            workers: 1,
        };
        match verify_theorem1(&p, &opts) {
            Err(Error::CapExceeded { required, cap }) => {
                assert_eq!(required, BigUint::from(216u32));
                assert_eq!(cap, 215);
            }
            other => panic!("expected CapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn theorem2_rejects_bad_threshold() {
        let p = params(3, 2);
        assert!(verify_theorem2(&p, 1, &EnumOptions::default()).is_err());
        assert!(verify_theorem2(&p, 4, &EnumOptions::default()).is_err());
    }
}
