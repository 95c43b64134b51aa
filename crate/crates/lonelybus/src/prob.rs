//! Exact probability values.
//!
//! Every probability this crate reports is an exact rational; decimal
//! rendering exists only for human convenience. Keeping the arithmetic exact
//! is what makes strict inequalities in the verification reports testable at
//! all: a claim like `P(A) > P(B)` is decided on reduced fractions, never on
//! floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// An exact probability: a rational confined to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(BigRational);

impl Probability {
    /// Wraps a rational, rejecting values outside `[0, 1]`.
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::InvalidInput(format!(
                "probability {value} is outside [0, 1]"
            )));
        }
        Ok(Self(value))
    }

    /// `count / total` as an exact probability. `count` must not exceed `total`.
    pub fn from_counts(count: impl Into<BigUint>, total: impl Into<BigUint>) -> Result<Self> {
        let count: BigUint = count.into();
        let total: BigUint = total.into();
        if total.is_zero() || count > total {
            return Err(Error::InvalidInput(format!(
                "{count}/{total} is not a probability"
            )));
        }
        Ok(Self(BigRational::new(
            BigInt::from(count),
            BigInt::from(total),
        )))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Advisory decimal approximation; the rational is the value of record.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

/// Renders as `numerator/denominator` with the denominator always explicit,
/// so the string round-trips exactly (`"0/1"`, `"3/4"`, `"1/1"`).
impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Probability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ratio = BigRational::from_str(s)
            .map_err(|e| Error::InvalidInput(format!("cannot parse {s:?} as a rational: {e}")))?;
        Self::new(ratio)
    }
}

/// Always-explicit `p/q` rendering for arbitrary rationals (claim sides in
/// verification reports may lawfully exceed 1).
pub fn ratio_string(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}
