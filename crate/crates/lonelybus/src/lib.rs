//! Exact statistics for the lonely-passenger problem.
//!
//! `n` passengers each board one of `k` buses independently and uniformly at
//! random; a passenger is *lonely* when nobody else picks their bus. This
//! crate computes the exact distribution of the lonely-passenger count with
//! arbitrary-precision rationals, tabulates stochastic dominance in the
//! number of buses, and mechanically re-checks, by exhaustive enumeration,
//! every event-level step of the reassignment-coupling proofs that the
//! dominance is real: tail probabilities only go up when a bus is added.
//!
//! The coupling runs the `k`-bus experiment on the same sample space as the
//! `(k+1)`-bus one: assign passengers to `k+1` buses, then retire bus `k+1`
//! and move its riders to buses `Y_1, Y_2, ...` drawn uniformly from the
//! surviving `k`. A *configuration* is the pair (initial assignment, target
//! list); all `(k+1)^n * k^n` configurations are equally likely, and the
//! reassigned allocation follows the plain `k`-bus law. Everything the
//! verifier checks is a statement about finite sets of configurations, so
//! every probability here is an exact rational with denominator
//! `(k+1)^n * k^n`.
//!
//! ```
//! use lonelybus::{dist, Params};
//!
//! let pmf = dist::exact_pmf(&Params::new(3, 3)?);
//! assert_eq!(pmf.mass(1).to_string(), "2/3");
//! assert_eq!(pmf.tail(1).to_string(), "8/9");
//! # Ok::<(), lonelybus::Error>(())
//! ```
//!
//! Module map:
//! - [`model`]: configurations, occupancies, the reassignment coupling, and
//!   exhaustive enumeration.
//! - [`dist`]: the exact distribution of the lonely count via a bus-by-bus
//!   DP (no enumeration), tails, expectations, dominance tables.
//! - [`events`]: pure predicates classifying a configuration against every
//!   event family used by the two coupling proofs.
//! - [`verify`]: the constructive maps (bijection and association) and the
//!   exhaustive verifiers producing exact claim-by-claim reports.
//! - [`mc`]: a seedable, counter-based Monte Carlo estimator for parameter
//!   ranges beyond the enumeration cap.
//! - [`output`], [`cli`]: machine-readable documents and the command-line
//!   front end.

use num_bigint::BigUint;
use thiserror::Error;

pub mod cli;
mod comb;
pub mod dist;
pub mod events;
pub mod mc;
pub mod model;
pub mod output;
pub mod prob;
pub mod verify;

pub use dist::{dominance_report, exact_pmf, expected_lonely, tail_prob, LonelyPmf};
pub use mc::{estimate_tail, Estimate};
pub use model::{Configuration, Occupancy, Params};
pub use prob::Probability;
pub use verify::{verify_theorem1, verify_theorem2, EnumOptions, VerificationReport};

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or sequence entry is outside its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exhaustive computation would enumerate more configurations than
    /// the cap allows. The message names the exact required count so callers
    /// can raise the cap deliberately or fall back to sampling.
    #[error("enumeration requires {required} configurations, exceeding the cap of {cap}")]
    CapExceeded { required: BigUint, cap: u64 },

    /// A constructive-map precondition failed; the message names the
    /// membership that did not hold.
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
