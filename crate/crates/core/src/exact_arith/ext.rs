use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number extended with the two infinities.
///
/// Variant order gives the total order `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        ExtRational::Finite(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        ExtRational::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        ExtRational::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(q) if q.is_zero())
    }

    pub fn is_negative(&self) -> bool {
        match self {
            ExtRational::NegInf => true,
            ExtRational::Finite(q) => q.is_negative(),
            ExtRational::PosInf => false,
        }
    }

    /// Sum; `+inf + -inf` is an error.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        use ExtRational::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::IndeterminateInfinity),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    /// Sum used for upper bounds: `+inf` absorbs everything, including `-inf`.
    pub fn upper_add(&self, other: &Self) -> Self {
        self.checked_add(other).unwrap_or(ExtRational::PosInf)
    }

    /// Product of non-negative values with `0 * inf = inf`, which is the safe
    /// choice for upper bounds.
    pub fn upper_mul_nonneg(&self, other: &Self) -> Result<Self> {
        use ExtRational::*;
        if self.is_negative() || other.is_negative() {
            return Err(Error::NegativeBound);
        }
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => Finite(a * b),
            _ => PosInf,
        })
    }

    pub fn neg(&self) -> Self {
        match self {
            ExtRational::NegInf => ExtRational::PosInf,
            ExtRational::PosInf => ExtRational::NegInf,
            ExtRational::Finite(q) => ExtRational::Finite(-q),
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(q: BigRational) -> Self {
        ExtRational::Finite(q)
    }
}

impl From<BigInt> for ExtRational {
    fn from(n: BigInt) -> Self {
        ExtRational::Finite(BigRational::from_integer(n))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("inf"),
            ExtRational::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Parses `a/b`, `a`, `inf`, `+inf` or `-inf`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtRational::PosInf),
            "-inf" => Ok(ExtRational::NegInf),
            other => parse_rational(other).map(ExtRational::Finite),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
