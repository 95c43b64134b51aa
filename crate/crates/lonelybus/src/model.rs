//! Configurations, occupancies, the reassignment coupling, and exhaustive
//! enumeration.
//!
//! A configuration pairs an initial assignment of `n` passengers to `k+1`
//! buses with a list of reassignment targets `Y_1..Y_n` in `[k]`. Retiring
//! bus `k+1` and moving its riders (in increasing passenger index) to buses
//! `Y_1, Y_2, ...` realizes the `k`-bus allocation law on the same sample
//! space as the `(k+1)`-bus one; that shared space is what the proof
//! verifier enumerates.
//!
//! Buses and passengers are 1-based throughout. Enumeration order is
//! lexicographic on the concatenation (assignment, targets), so partitioned
//! runs over contiguous index ranges are reproducible and combine by plain
//! summation.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::{Error, Result};

/// Problem size: `n >= 2` passengers, `k >= 1` buses (before the extra bus
/// is added for the coupling).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    n: u32,
    k: u32,
}

impl Params {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 passengers, got n={n}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidInput("need at least 1 bus, got k=0".into()));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Index of the bus that gets retired by the coupling.
    pub fn extra_bus(&self) -> u32 {
        self.k + 1
    }

    /// Validates a lonely-count threshold `1 <= r <= n`.
    pub fn check_threshold(&self, r: u32) -> Result<()> {
        if r < 1 || r > self.n {
            return Err(Error::InvalidInput(format!(
                "threshold r={r} is outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Per-bus passenger counts; entries always sum to the number of passengers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    loads: Vec<u32>,
}

impl Occupancy {
    /// Counts passengers per bus. Entries of `assignment` must lie in
    /// `1..=bus_count`.
    pub fn from_assignment(assignment: &[u32], bus_count: u32) -> Result<Self> {
        let mut loads = vec![0u32; bus_count as usize];
        for (pos, &bus) in assignment.iter().enumerate() {
            if bus < 1 || bus > bus_count {
                return Err(Error::InvalidInput(format!(
                    "passenger {} assigned to bus {bus}, valid buses are 1..={bus_count}",
                    pos + 1
                )));
            }
            loads[(bus - 1) as usize] += 1;
        }
        Ok(Self { loads })
    }

    pub fn loads(&self) -> &[u32] {
        &self.loads
    }

    /// Load of 1-based bus `bus`.
    pub fn load(&self, bus: u32) -> u32 {
        self.loads[(bus - 1) as usize]
    }

    pub fn bus_count(&self) -> u32 {
        self.loads.len() as u32
    }

    pub fn total(&self) -> u32 {
        self.loads.iter().sum()
    }

    /// Number of lonely passengers: singleton buses and lonely passengers
    /// are in bijection, so this counts buses with load exactly 1.
    pub fn lonely_count(&self) -> u32 {
        self.loads.iter().filter(|&&l| l == 1).count() as u32
    }

    /// Number of buses among the first `upto` with load exactly 1.
    pub fn singletons_among(&self, upto: u32) -> u32 {
        self.loads[..upto as usize].iter().filter(|&&l| l == 1).count() as u32
    }
}

/// A sample point of the coupling: initial assignment over `k+1` buses plus
/// the reassignment targets `Y_1..Y_n` over `[k]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    assignment: Vec<u32>,
    targets: Vec<u32>,
}

impl Configuration {
    pub fn new(assignment: Vec<u32>, targets: Vec<u32>, params: &Params) -> Result<Self> {
        let n = params.n() as usize;
        if assignment.len() != n || targets.len() != n {
            return Err(Error::InvalidInput(format!(
                "configuration needs {n} assignment entries and {n} targets, got {} and {}",
                assignment.len(),
                targets.len()
            )));
        }
        for &bus in &assignment {
            if bus < 1 || bus > params.extra_bus() {
                return Err(Error::InvalidInput(format!(
                    "assignment entry {bus} is outside 1..={}",
                    params.extra_bus()
                )));
            }
        }
        for &bus in &targets {
            if bus < 1 || bus > params.k() {
                return Err(Error::InvalidInput(format!(
                    "target entry {bus} is outside 1..={}",
                    params.k()
                )));
            }
        }
        Ok(Self { assignment, targets })
    }

    pub(crate) fn from_parts_unchecked(assignment: Vec<u32>, targets: Vec<u32>) -> Self {
        Self { assignment, targets }
    }

    /// Initial bus of each passenger, entries in `1..=k+1`.
    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Reassignment targets `Y_1..Y_n`, entries in `1..=k`.
    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// Target `Y_j` for 1-based index `j`.
    pub fn target(&self, j: u32) -> u32 {
        self.targets[(j - 1) as usize]
    }

    /// Occupancy `X_1..X_{k+1}` before reassignment.
    pub fn occupancy(&self, params: &Params) -> Occupancy {
        debug_assert_eq!(self.assignment.len(), params.n() as usize);
        let mut loads = vec![0u32; params.extra_bus() as usize];
        for &bus in &self.assignment {
            loads[(bus - 1) as usize] += 1;
        }
        Occupancy { loads }
    }

    /// Retires the extra bus: its riders, in increasing passenger index,
    /// move to buses `Y_1, ..., Y_m` respectively (`m` = extra-bus load);
    /// everyone else keeps their bus. Returns the resulting `k`-bus
    /// assignment and its occupancy `X'_1..X'_k`.
    pub fn reassign(&self, params: &Params) -> (Vec<u32>, Occupancy) {
        let extra = params.extra_bus();
        let mut loads = vec![0u32; params.k() as usize];
        let mut assignment = Vec::with_capacity(self.assignment.len());
        let mut next_target = 0usize;
        for &bus in &self.assignment {
            let new_bus = if bus == extra {
                let y = self.targets[next_target];
                next_target += 1;
                y
            } else {
                bus
            };
            assignment.push(new_bus);
            loads[(new_bus - 1) as usize] += 1;
        }
        (assignment, Occupancy { loads })
    }
}

/// Total number of configurations, `(k+1)^n * k^n`.
pub fn configuration_count(params: &Params) -> BigUint {
    let n = params.n();
    BigUint::from(params.extra_bus()).pow(n) * BigUint::from(params.k()).pow(n)
}

/// Checks the count against a cap and returns it as a `u64`.
pub(crate) fn checked_count(params: &Params, max_configurations: u64) -> Result<u64> {
    let required = configuration_count(params);
    match required.to_u64() {
        Some(count) if count <= max_configurations => Ok(count),
        _ => Err(Error::CapExceeded {
            required,
            cap: max_configurations,
        }),
    }
}

/// Configuration with lexicographic rank `index` (0-based) in the order on
/// concatenated (assignment, targets) sequences.
pub(crate) fn configuration_at(params: &Params, index: u64) -> Configuration {
    let n = params.n() as usize;
    let k = params.k() as u64;
    let buses = params.extra_bus() as u64;
    let mut rest = index;
    let mut targets = vec![0u32; n];
    for slot in targets.iter_mut().rev() {
        *slot = (rest % k) as u32 + 1;
        rest /= k;
    }
    let mut assignment = vec![0u32; n];
    for slot in assignment.iter_mut().rev() {
        *slot = (rest % buses) as u32 + 1;
        rest /= buses;
    }
    debug_assert_eq!(rest, 0);
    Configuration { assignment, targets }
}

/// Odometer step to the lexicographic successor. Returns `false` on wrap.
fn advance(config: &mut Configuration, params: &Params) -> bool {
    for slot in config.targets.iter_mut().rev() {
        if *slot < params.k() {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    for slot in config.assignment.iter_mut().rev() {
        if *slot < params.extra_bus() {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    false
}

/// Applies `visit` to every configuration with rank in `start..end`, in
/// lexicographic order. The scratch configuration is reused between calls.
pub(crate) fn for_each_in_range<F>(params: &Params, start: u64, end: u64, mut visit: F)
where
    F: FnMut(u64, &Configuration),
{
    if start >= end {
        return;
    }
    let mut config = configuration_at(params, start);
    let mut index = start;
    loop {
        visit(index, &config);
        index += 1;
        if index == end {
            break;
        }
        let stepped = advance(&mut config, params);
        debug_assert!(stepped, "ran past the last configuration");
    }
}

/// Iterator over all configurations in lexicographic order.
///
/// Every element of `[k+1]^n x [k]^n` is yielded exactly once; each carries
/// the uniform weight `1 / ((k+1)^n * k^n)`.
#[derive(Debug)]
pub struct Configurations {
    params: Params,
    next: u64,
    end: u64,
}

impl Iterator for Configurations {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.next >= self.end {
            return None;
        }
        let config = configuration_at(&self.params, self.next);
        self.next += 1;
        Some(config)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Configurations {}

/// Streams every configuration once, in lexicographic order, after checking
/// that the total count fits under `max_configurations`.
pub fn enumerate_configurations(
    params: &Params,
    max_configurations: u64,
) -> Result<Configurations> {
    let total = checked_count(params, max_configurations)?;
    Ok(Configurations {
        params: *params,
        next: 0,
        end: total,
    })
}
