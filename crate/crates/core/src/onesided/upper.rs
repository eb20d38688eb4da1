use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::stream::Stream;
use crate::error::{Error, Result};
use crate::exact_arith::{log2_approx, ExtRational};

/// Stage used to read coarse magnitudes when choosing how far to boost
/// input stages.
pub(crate) const COARSE_STAGE: u32 = 8;

/// A real known through a stage-indexed, antitone stream of upper bounds.
///
/// The value is the infimum of the bounds. Constants (including the exact
/// `Zero` and `One` tokens) carry their value directly; everything else is
/// computed lazily and memoized per stage.
#[derive(Clone)]
pub struct UpperReal(Arc<Repr>);

enum Repr {
    Const(ExtRational),
    Stream(Stream<ExtRational>),
}

/// One line of a bounds dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub stage: u32,
    pub bound: ExtRational,
}

fn keep_min(raw: ExtRational, prev: &ExtRational) -> ExtRational {
    if &raw < prev {
        raw
    } else {
        prev.clone()
    }
}

impl UpperReal {
    pub fn constant(q: ExtRational) -> Self {
        UpperReal(Arc::new(Repr::Const(q)))
    }

    pub fn zero() -> Self {
        Self::constant(ExtRational::zero())
    }

    pub fn one() -> Self {
        Self::constant(ExtRational::one())
    }

    pub fn pos_inf() -> Self {
        Self::constant(ExtRational::PosInf)
    }

    /// Wraps a raw evaluator. The evaluator must return valid upper bounds;
    /// the stored stream is made antitone by a running minimum.
    pub fn from_fn(f: impl Fn(u32) -> ExtRational + Send + Sync + 'static) -> Self {
        UpperReal(Arc::new(Repr::Stream(Stream::new(Box::new(f), keep_min))))
    }

    pub fn bound(&self, stage: u32) -> ExtRational {
        match &*self.0 {
            Repr::Const(q) => q.clone(),
            Repr::Stream(s) => s.get(stage),
        }
    }

    pub fn as_const(&self) -> Option<&ExtRational> {
        match &*self.0 {
            Repr::Const(q) => Some(q),
            Repr::Stream(_) => None,
        }
    }

    /// True only for the exact zero token, never for a stream that happens
    /// to reach 0.
    pub fn is_zero_token(&self) -> bool {
        self.as_const().is_some_and(ExtRational::is_zero)
    }

    pub fn is_one_token(&self) -> bool {
        self.as_const().is_some_and(|q| *q == ExtRational::one())
    }

    /// Bounds for stages `0..=last`.
    pub fn dump(&self, last: u32) -> Vec<BoundEntry> {
        (0..=last)
            .map(|stage| BoundEntry {
                stage,
                bound: self.bound(stage),
            })
            .collect()
    }

    /// First stage `<= max_stage` whose bound is strictly below `q`: a
    /// certificate that the value is `< q`.
    pub fn certify_below(&self, q: &ExtRational, max_stage: u32) -> Option<u32> {
        (0..=max_stage).find(|&s| &self.bound(s) < q)
    }
}

impl fmt::Debug for UpperReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Const(q) => write!(f, "UpperReal::Const({q})"),
            Repr::Stream(_) => write!(f, "UpperReal::Stream(bound(0) = {})", self.bound(0)),
        }
    }
}

/// Rough `log2` of a bound's magnitude, 0 for infinities and small values.
pub(crate) fn magnitude_bits(q: &ExtRational) -> u32 {
    match q {
        ExtRational::Finite(r) if !r.is_zero() => log2_approx(&r.abs()).max(0.0).ceil() as u32,
        _ => 0,
    }
}

pub fn upper_from_rational(q: ExtRational) -> UpperReal {
    UpperReal::constant(q)
}

/// Sum of upper reals.
pub fn upper_add(x: &UpperReal, y: &UpperReal) -> Result<UpperReal> {
    if let (Some(a), Some(b)) = (x.as_const(), y.as_const()) {
        return a.checked_add(b).map(UpperReal::constant);
    }
    let (x, y) = (x.clone(), y.clone());
    Ok(UpperReal::from_fn(move |n| {
        x.bound(n + 1).upper_add(&y.bound(n + 1))
    }))
}

fn clamp_nonneg(q: ExtRational) -> ExtRational {
    if q.is_negative() {
        ExtRational::zero()
    } else {
        q
    }
}

/// Product of non-negative upper reals. The exact zero token absorbs
/// everything, including `+inf`; otherwise `0 * inf` is `inf` at a stage.
pub fn upper_mul(x: &UpperReal, y: &UpperReal) -> Result<UpperReal> {
    for v in [x, y] {
        if v.bound(0).is_negative() {
            return Err(Error::NegativeBound);
        }
    }
    if x.is_zero_token() || y.is_zero_token() {
        return Ok(UpperReal::zero());
    }
    if x.is_one_token() {
        return Ok(y.clone());
    }
    if y.is_one_token() {
        return Ok(x.clone());
    }
    if let (Some(a), Some(b)) = (x.as_const(), y.as_const()) {
        return a.upper_mul_nonneg(b).map(UpperReal::constant);
    }
    let (x, y) = (x.clone(), y.clone());
    let boost = Mutex::new(None::<u32>);
    Ok(UpperReal::from_fn(move |n| {
        let g = *boost.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert_with(|| {
            2 + magnitude_bits(&x.bound(COARSE_STAGE)).max(magnitude_bits(&y.bound(COARSE_STAGE)))
        });
        let (a, b) = (clamp_nonneg(x.bound(n + g)), clamp_nonneg(y.bound(n + g)));
        a.upper_mul_nonneg(&b).unwrap_or(ExtRational::PosInf)
    }))
}

pub fn upper_min(x: &UpperReal, y: &UpperReal) -> UpperReal {
    if let (Some(a), Some(b)) = (x.as_const(), y.as_const()) {
        return UpperReal::constant(a.clone().min(b.clone()));
    }
    let (x, y) = (x.clone(), y.clone());
    UpperReal::from_fn(move |n| x.bound(n).min(y.bound(n)))
}

pub fn upper_max(x: &UpperReal, y: &UpperReal) -> UpperReal {
    if let (Some(a), Some(b)) = (x.as_const(), y.as_const()) {
        return UpperReal::constant(a.clone().max(b.clone()));
    }
    let (x, y) = (x.clone(), y.clone());
    UpperReal::from_fn(move |n| x.bound(n).max(y.bound(n)))
}

/// Infimum of a finite family; the empty family is `+inf`.
pub fn upper_inf(family: &[UpperReal]) -> UpperReal {
    if family.is_empty() {
        return UpperReal::pos_inf();
    }
    if family.iter().all(|u| u.as_const().is_some()) {
        let m = family.iter().filter_map(|u| u.as_const()).min().cloned();
        return UpperReal::constant(m.unwrap_or(ExtRational::PosInf));
    }
    let family = family.to_vec();
    UpperReal::from_fn(move |n| {
        family
            .iter()
            .map(|u| u.bound(n))
            .min()
            .unwrap_or(ExtRational::PosInf)
    })
}

/// Infimum of a countable family on the diagonal schedule: stage `n` looks
/// at the first `n` members, each at stage `n`.
pub fn upper_inf_scheduled(member: impl Fn(usize) -> UpperReal + Send + Sync + 'static) -> UpperReal {
    let members: Mutex<Vec<UpperReal>> = Mutex::new(Vec::new());
    UpperReal::from_fn(move |n| {
        let mut cache = members.lock().unwrap_or_else(|e| e.into_inner());
        while cache.len() < n as usize {
            let k = cache.len();
            cache.push(member(k));
        }
        cache
            .iter()
            .take(n as usize)
            .map(|u| u.bound(n))
            .min()
            .unwrap_or(ExtRational::PosInf)
    })
}
