//! Exact rational scalars and the extended value lattice `[0, ∞]` used by
//! distances and sublinear projections. No floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Shorthand constructor for an exact rational from machine integers.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer-valued rational.
pub fn rint(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// A non-negative rational extended with `+∞`, totally ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtRat {
    Finite(BigRational),
    Infinite,
}

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat::Finite(BigRational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRat::Finite(q) => Some(q),
            ExtRat::Infinite => None,
        }
    }

    pub fn checked_add(&self, other: &ExtRat) -> ExtRat {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinite,
        }
    }
}

impl From<BigRational> for ExtRat {
    fn from(q: BigRational) -> Self {
        ExtRat::Finite(q)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinite) => Ordering::Less,
            (ExtRat::Infinite, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinite, ExtRat::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(q) => write!(f, "{}", format_rational(q)),
            ExtRat::Infinite => write!(f, "inf"),
        }
    }
}

/// Canonical `p/q` rendering with a positive denominator, always including
/// the denominator so serialized values are byte-stable.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Decimal approximation for human-readable output.
pub fn approx_decimal(q: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (q * BigRational::from_integer(scale.clone())).round();
    let int = scaled.to_integer();
    let neg = int.is_negative();
    let abs = int.abs();
    let (whole, frac) = (abs.clone() / &scale, abs % &scale);
    let frac_str = format!("{:0width$}", frac, width = digits as usize);
    let sign = if neg { "-" } else { "" };
    format!("{sign}{whole}.{frac_str}")
}

/// Parses `p/q` or a bare integer `p` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Format(format!("cannot parse rational from {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| bad())?;
        let denom: BigInt = d.trim().parse().map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(numer, denom))
    } else {
        let numer: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(numer))
    }
}

/// Floor of a rational as an integer-valued rational.
pub fn floor_rational(q: &BigRational) -> BigRational {
    BigRational::from_integer(q.floor().to_integer())
}

/// Smallest integer n with n >= q.
pub fn ceil_to_i64(q: &BigRational) -> i64 {
    use num_traits::ToPrimitive;
    q.ceil()
        .to_integer()
        .to_i64()
        .expect("grid coordinate out of i64 range")
}

pub fn is_one(q: &BigRational) -> bool {
    q.is_one()
}
