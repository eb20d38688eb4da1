use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact_arith::{is_prime, ExtRational};
use crate::onesided::{DedekindReal, UpperReal};

/// Exponent of a `Power` closed form.
#[derive(Clone, Debug)]
pub enum Exponent {
    Exact(ExtRational),
    Real(DedekindReal),
}

impl Exponent {
    pub fn upper(&self) -> UpperReal {
        match self {
            Exponent::Exact(q) => UpperReal::constant(q.clone()),
            Exponent::Real(d) => d.upper(),
        }
    }

    pub fn as_exact(&self) -> Option<&ExtRational> {
        match self {
            Exponent::Exact(q) => Some(q),
            Exponent::Real(_) => None,
        }
    }
}

impl From<ExtRational> for Exponent {
    fn from(q: ExtRational) -> Self {
        Exponent::Exact(q)
    }
}

/// Closed-form description of a standard absolute value on Z.
///
/// `Power(Padic(p), lambda)` is `n -> (p^ord_p(n))^lambda` with
/// `lambda <= 0` (so `lambda = -1` is the usual p-adic value and
/// `lambda = -inf` the p-characteristic one); `Power(Euclid, lambda)` is
/// `n -> |n|^lambda` with `0 <= lambda <= 1`.
#[derive(Clone, Debug)]
pub enum ClosedForm {
    Trivial,
    Euclid,
    Padic(BigInt),
    PChar(BigInt),
    Power { inner: Box<ClosedForm>, lambda: Exponent },
}

impl ClosedForm {
    pub fn padic(p: i64) -> Self {
        ClosedForm::Padic(BigInt::from(p))
    }

    pub fn pchar(p: i64) -> Self {
        ClosedForm::PChar(BigInt::from(p))
    }

    pub fn power(inner: ClosedForm, lambda: impl Into<Exponent>) -> Self {
        ClosedForm::Power {
            inner: Box::new(inner),
            lambda: lambda.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_prime = |p: &BigInt| {
            if is_prime(p) {
                Ok(())
            } else {
                Err(Error::BadParameter(format!("{p} is not prime")))
            }
        };
        match self {
            ClosedForm::Trivial | ClosedForm::Euclid => Ok(()),
            ClosedForm::Padic(p) | ClosedForm::PChar(p) => check_prime(p),
            ClosedForm::Power { inner, lambda } => {
                let (lo, hi) = match &**inner {
                    ClosedForm::Euclid => (ExtRational::zero(), ExtRational::one()),
                    ClosedForm::Padic(p) => {
                        check_prime(p)?;
                        (ExtRational::NegInf, ExtRational::zero())
                    }
                    other => {
                        return Err(Error::BadParameter(format!(
                            "power of {} is not supported",
                            other.kind_name()
                        )))
                    }
                };
                let out_of_range = match lambda {
                    Exponent::Exact(q) => q < &lo || q > &hi,
                    Exponent::Real(d) => {
                        let below = lo
                            .finite()
                            .is_some_and(|l| d.certify_below(l, 40).is_some());
                        let above = hi
                            .finite()
                            .is_some_and(|h| d.certify_above(h, 40).is_some());
                        below || above
                    }
                };
                if out_of_range {
                    return Err(Error::BadParameter(format!(
                        "lambda must lie in [{lo}, {hi}] for {}",
                        inner.kind_name()
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ClosedForm::Trivial => "trivial",
            ClosedForm::Euclid => "euclid",
            ClosedForm::Padic(_) => "padic",
            ClosedForm::PChar(_) => "pchar",
            ClosedForm::Power { .. } => "power",
        }
    }

    /// Collapses powers that are themselves standard kinds
    /// (`lambda = 0` is trivial, `Euclid^1`, `Padic^-1`, `Padic^-inf`).
    pub fn normalized(&self) -> ClosedForm {
        if let ClosedForm::Power { inner, lambda: Exponent::Exact(q) } = self {
            let one = ExtRational::one();
            match (&**inner, q) {
                (_, q) if q.is_zero() => return ClosedForm::Trivial,
                (ClosedForm::Euclid, q) if *q == one => return ClosedForm::Euclid,
                (ClosedForm::Padic(p), q) if *q == one.neg() => return ClosedForm::Padic(p.clone()),
                (ClosedForm::Padic(p), ExtRational::NegInf) => return ClosedForm::PChar(p.clone()),
                _ => {}
            }
        }
        self.clone()
    }

    /// The exponent of the `(ideal, lambda)` pair this closed form sits at.
    pub fn lambda(&self) -> Option<Exponent> {
        Some(match self {
            ClosedForm::Trivial => Exponent::Exact(ExtRational::zero()),
            ClosedForm::Euclid => Exponent::Exact(ExtRational::one()),
            ClosedForm::Padic(_) => Exponent::Exact(ExtRational::from_int(-1)),
            ClosedForm::PChar(_) => Exponent::Exact(ExtRational::NegInf),
            ClosedForm::Power { lambda, .. } => lambda.clone(),
        })
    }

    /// The prime of a non-Archimedean closed form.
    pub fn prime(&self) -> Option<&BigInt> {
        match self {
            ClosedForm::Padic(p) | ClosedForm::PChar(p) => Some(p),
            ClosedForm::Power { inner, .. } => inner.prime(),
            _ => None,
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Trivial => f.write_str("trivial"),
            ClosedForm::Euclid => f.write_str("euclid"),
            ClosedForm::Padic(p) => write!(f, "padic({p})"),
            ClosedForm::PChar(p) => write!(f, "pchar({p})"),
            ClosedForm::Power { inner, lambda } => match lambda {
                Exponent::Exact(q) => write!(f, "power({inner}, {q})"),
                Exponent::Real(d) => {
                    let (lo, hi) = d.interval(20);
                    write!(f, "power({inner}, [{lo}, {hi}])")
                }
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Wire {
    Trivial,
    Euclid,
    Padic { p: String },
    Pchar { p: String },
    Power { inner: Box<Wire>, lambda: String },
}

impl TryFrom<&ClosedForm> for Wire {
    type Error = Error;

    fn try_from(c: &ClosedForm) -> Result<Wire> {
        Ok(match c {
            ClosedForm::Trivial => Wire::Trivial,
            ClosedForm::Euclid => Wire::Euclid,
            ClosedForm::Padic(p) => Wire::Padic { p: p.to_string() },
            ClosedForm::PChar(p) => Wire::Pchar { p: p.to_string() },
            ClosedForm::Power { inner, lambda } => Wire::Power {
                inner: Box::new(Wire::try_from(&**inner)?),
                lambda: lambda
                    .as_exact()
                    .ok_or_else(|| Error::BadParameter("real exponents have no wire form".into()))?
                    .to_string(),
            },
        })
    }
}

impl TryFrom<Wire> for ClosedForm {
    type Error = Error;

    fn try_from(w: Wire) -> Result<ClosedForm> {
        let prime = |p: String| -> Result<BigInt> {
            p.trim().parse().map_err(|_| Error::Parse(format!("bad prime {p:?}")))
        };
        let c = match w {
            Wire::Trivial => ClosedForm::Trivial,
            Wire::Euclid => ClosedForm::Euclid,
            Wire::Padic { p } => ClosedForm::Padic(prime(p)?),
            Wire::Pchar { p } => ClosedForm::PChar(prime(p)?),
            Wire::Power { inner, lambda } => ClosedForm::Power {
                inner: Box::new(ClosedForm::try_from(*inner)?),
                lambda: Exponent::Exact(lambda.parse()?),
            },
        };
        c.validate()?;
        Ok(c)
    }
}

impl Serialize for ClosedForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire::try_from(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClosedForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ClosedForm::try_from(Wire::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `p^k` as a rational.
pub fn prime_power(p: &BigInt, k: u64) -> BigRational {
    BigRational::from_integer(num_traits::pow(p.clone(), k as usize))
}
