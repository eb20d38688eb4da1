//! Prime ideals of Z at desk scale: detecting the ideal `{n : |n| < 1}` of an
//! absolute value, extracting its generator by gcds, and the formal
//! subtraction closure on N+.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::absval::{AbsValue, CheckReport, Verdict, Window};
use crate::error::{Error, Result};
use crate::exact_arith::{factorize, is_prime, ExtRational};

/// Record of a trial division: no divisor in `[2, trial_limit]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalityEvidence {
    pub trial_limit: BigInt,
}

/// A prime ideal of Z as seen from finite evidence.
///
/// `ZeroCandidate` is not a claim that the ideal is (0): no witness was
/// found within the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeIdealZ {
    ZeroCandidate,
    Principal { p: BigInt, evidence: PrimalityEvidence },
}

impl PrimeIdealZ {
    pub fn principal(p: BigInt) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        let trial_limit = p.sqrt();
        Ok(PrimeIdealZ::Principal {
            p,
            evidence: PrimalityEvidence { trial_limit },
        })
    }

    pub fn generator(&self) -> Option<&BigInt> {
        match self {
            PrimeIdealZ::ZeroCandidate => None,
            PrimeIdealZ::Principal { p, .. } => Some(p),
        }
    }

    pub fn is_zero_candidate(&self) -> bool {
        matches!(self, PrimeIdealZ::ZeroCandidate)
    }
}

impl fmt::Display for PrimeIdealZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeIdealZ::ZeroCandidate => f.write_str("0"),
            PrimeIdealZ::Principal { p, .. } => write!(f, "{p}"),
        }
    }
}

impl FromStr for PrimeIdealZ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s == "0-candidate" {
            return Ok(PrimeIdealZ::ZeroCandidate);
        }
        let p: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad ideal {s:?}")))?;
        PrimeIdealZ::principal(p)
    }
}

impl Serialize for PrimeIdealZ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PrimeIdealZ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A certified `|n| < 1` statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "crate::wire")]
    pub n: BigInt,
    pub stage: u32,
    pub bound: ExtRational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealEvidence {
    pub witnesses: Vec<Witness>,
    /// Running gcd of the witnesses.
    #[serde(with = "crate::wire::vec")]
    pub gcd_trace: Vec<BigInt>,
}

/// Collects every `n` in `[2, budget]` whose stage bound is below 1 and reads
/// the generator off their gcd.
pub fn detect_ideal(av: &AbsValue, budget: u64, stage: u32) -> Result<(PrimeIdealZ, IdealEvidence)> {
    let one = ExtRational::one();
    let mut evidence = IdealEvidence::default();
    let mut g = BigInt::zero();
    for n in (2..=budget).map(BigInt::from) {
        let bound = av.eval(&n, stage);
        if bound < one {
            g = g.gcd(&n);
            evidence.gcd_trace.push(g.clone());
            evidence.witnesses.push(Witness { n, stage, bound });
        }
    }
    if evidence.witnesses.is_empty() {
        return Ok((PrimeIdealZ::ZeroCandidate, evidence));
    }
    if g.is_one() {
        return Err(Error::InconsistentOracle(format!(
            "witnesses {} have gcd 1",
            evidence.witnesses.iter().map(|w| w.n.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    if is_prime(&g) {
        return Ok((PrimeIdealZ::principal(g)?, evidence));
    }
    let factors = factorize(&g)?;
    for q in factors.primes() {
        if av.eval(q, stage) < one {
            return Ok((PrimeIdealZ::principal(q.clone())?, evidence));
        }
    }
    Ok((PrimeIdealZ::ZeroCandidate, evidence))
}

pub fn ideal_member(ideal: &PrimeIdealZ, n: &BigInt) -> bool {
    match ideal {
        PrimeIdealZ::ZeroCandidate => n.is_zero(),
        PrimeIdealZ::Principal { p, .. } => n.is_multiple_of(p),
    }
}

/// Outcome of generator extraction from a finite set of ideal elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Extraction {
    Principal {
        #[serde(with = "crate::wire")]
        p: BigInt,
    },
    Ambiguous {
        #[serde(with = "crate::wire::vec")]
        candidates: Vec<BigInt>,
    },
    Contradiction,
}

/// Generator of the prime ideal containing `elements`, if there is exactly
/// one: the gcd must be a prime power.
pub fn extract_prime(elements: &[BigInt]) -> Result<Extraction> {
    if elements.is_empty() {
        return Err(Error::BadParameter("no elements".into()));
    }
    if elements.iter().any(Zero::is_zero) {
        return Err(Error::ZeroInput);
    }
    let g = elements.iter().fold(BigInt::zero(), |g, e| g.gcd(e));
    if g.is_one() {
        return Ok(Extraction::Contradiction);
    }
    let factors = factorize(&g)?;
    let candidates: Vec<BigInt> = factors.primes().cloned().collect();
    Ok(match candidates.as_slice() {
        [p] => Extraction::Principal { p: p.clone() },
        _ => Extraction::Ambiguous { candidates },
    })
}

/// Closure of `S` under formal subtraction (`m, m+n in S` implies `n in S`)
/// and under multiples within `[1, window_max]`.
pub fn check_subtractive_ideal(set: &BTreeSet<u64>, window_max: u64) -> Result<CheckReport> {
    if set.iter().any(|&m| m == 0 || m > window_max) {
        return Err(Error::BadParameter(format!("set must lie in [1, {window_max}]")));
    }
    let hi = i64::try_from(window_max).map_err(|_| Error::BadParameter("window too large".into()))?;
    let mut report = CheckReport::new("subtractive ideal", Window::new(1, hi), 0);
    for &m in set {
        for &sum in set.range(m + 1..) {
            report.checked += 1;
            let n = sum - m;
            if !set.contains(&n) {
                report.verdict = Verdict::fail(m, n);
                report.detail = Some(format!("{m} and {sum} in S but {n} is not"));
                return Ok(report);
            }
        }
    }
    for &m in set {
        for km in (2 * m..=window_max).step_by(m as usize) {
            report.checked += 1;
            if !set.contains(&km) {
                report.verdict = Verdict::fail(m, km);
                report.detail = Some(format!("{m} in S but its multiple {km} is not"));
                return Ok(report);
            }
        }
    }
    Ok(report)
}
