use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::stream::Stream;
use super::upper::{BoundEntry, UpperReal};
use crate::error::{Error, Result};
use crate::exact_arith::{two_pow, ExtRational};

/// Extra stages tried, in order, when an operation needs its inputs at a
/// finer stage to meet the output width.
const BOOSTS: [u32; 9] = [0, 2, 4, 8, 16, 32, 64, 128, 256];

/// A real given by nested rational intervals of width at most `2^-stage`.
#[derive(Clone)]
pub struct DedekindReal(Arc<DRepr>);

enum DRepr {
    Const(BigRational),
    Stream(Stream<(BigRational, BigRational)>),
}

fn intersect(raw: (BigRational, BigRational), prev: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    let lo = raw.0.max(prev.0.clone());
    let hi = raw.1.min(prev.1.clone());
    if lo <= hi {
        (lo, hi)
    } else {
        prev.clone()
    }
}

impl DedekindReal {
    pub fn from_rational(q: BigRational) -> Self {
        DedekindReal(Arc::new(DRepr::Const(q)))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// Wraps an interval evaluator; the stored intervals are intersected
    /// stage by stage so they are always nested.
    pub fn from_fn(f: impl Fn(u32) -> (BigRational, BigRational) + Send + Sync + 'static) -> Self {
        DedekindReal(Arc::new(DRepr::Stream(Stream::new(Box::new(f), intersect))))
    }

    pub fn interval(&self, stage: u32) -> (BigRational, BigRational) {
        match &*self.0 {
            DRepr::Const(q) => (q.clone(), q.clone()),
            DRepr::Stream(s) => s.get(stage),
        }
    }

    pub fn lo(&self, stage: u32) -> BigRational {
        self.interval(stage).0
    }

    pub fn hi(&self, stage: u32) -> BigRational {
        self.interval(stage).1
    }

    pub fn width(&self, stage: u32) -> BigRational {
        let (lo, hi) = self.interval(stage);
        hi - lo
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match &*self.0 {
            DRepr::Const(q) => Some(q),
            DRepr::Stream(_) => None,
        }
    }

    /// The upper half: bounds are the interval tops.
    pub fn upper(&self) -> UpperReal {
        if let Some(q) = self.as_const() {
            return UpperReal::constant(ExtRational::Finite(q.clone()));
        }
        let me = self.clone();
        UpperReal::from_fn(move |n| ExtRational::Finite(me.hi(n)))
    }

    /// The lower half: bounds are the interval bottoms.
    pub fn lower(&self) -> LowerReal {
        if let Some(q) = self.as_const() {
            return LowerReal::constant(ExtRational::Finite(q.clone()));
        }
        let me = self.clone();
        LowerReal::from_fn(move |n| ExtRational::Finite(me.lo(n)))
    }

    /// First stage `<= max_stage` whose interval lies strictly above `q`.
    pub fn certify_above(&self, q: &BigRational, max_stage: u32) -> Option<u32> {
        (0..=max_stage).find(|&s| &self.lo(s) > q)
    }

    /// First stage `<= max_stage` whose interval lies strictly below `q`.
    pub fn certify_below(&self, q: &BigRational, max_stage: u32) -> Option<u32> {
        (0..=max_stage).find(|&s| &self.hi(s) < q)
    }

    /// First stage whose interval excludes zero.
    pub(crate) fn certify_nonzero(&self, max_stage: u32) -> Option<u32> {
        (0..=max_stage).find(|&s| {
            let (lo, hi) = self.interval(s);
            lo.is_positive() || hi.is_negative()
        })
    }
}

impl fmt::Debug for DedekindReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.interval(0);
        write!(f, "DedekindReal([{lo}, {hi}] at stage 0)")
    }
}

/// Evaluates `f` at boosted stages until the interval is at most `2^-n`
/// wide; returns the last attempt if the boosts run out.
pub(crate) fn refine(
    n: u32,
    floor_stage: u32,
    f: impl Fn(u32) -> Result<(BigRational, BigRational)>,
) -> (BigRational, BigRational) {
    let tol = two_pow(-(n as i64));
    let mut last = None;
    for extra in BOOSTS {
        let k = (n + extra).max(floor_stage);
        match f(k) {
            Ok((lo, hi)) => {
                let ok = &hi - &lo <= tol;
                last = Some((lo, hi));
                if ok {
                    break;
                }
            }
            Err(_) => continue,
        }
    }
    last.unwrap_or_else(|| (BigRational::zero(), BigRational::zero()))
}

fn interval_mul(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    let ps = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = ps.iter().min().cloned().unwrap_or_else(BigRational::zero);
    let hi = ps.iter().max().cloned().unwrap_or_else(BigRational::zero);
    (lo, hi)
}

/// Product of Dedekind reals.
pub fn ded_mul(x: &DedekindReal, y: &DedekindReal) -> DedekindReal {
    if let (Some(a), Some(b)) = (x.as_const(), y.as_const()) {
        return DedekindReal::from_rational(a * b);
    }
    let (x, y) = (x.clone(), y.clone());
    DedekindReal::from_fn(move |n| refine(n, 0, |k| Ok(interval_mul(&x.interval(k), &y.interval(k)))))
}

/// Quotient; the divisor must be certifiably non-zero within 64 stages.
pub fn ded_div(x: &DedekindReal, y: &DedekindReal) -> Result<DedekindReal> {
    let start = y.certify_nonzero(64).ok_or(Error::ZeroDenominator)?;
    if let (Some(a), Some(b)) = (x.as_const(), y.as_const()) {
        return Ok(DedekindReal::from_rational(a / b));
    }
    let (x, y) = (x.clone(), y.clone());
    Ok(DedekindReal::from_fn(move |n| {
        refine(n, start, |k| {
            let (lo, hi) = y.interval(k);
            Ok(interval_mul(&x.interval(k), &(hi.recip(), lo.recip())))
        })
    }))
}

/// A real known through nondecreasing lower bounds; its value is the
/// supremum.
#[derive(Clone)]
pub struct LowerReal(Arc<LRepr>);

enum LRepr {
    Const(ExtRational),
    Stream(Stream<ExtRational>),
}

fn keep_max(raw: ExtRational, prev: &ExtRational) -> ExtRational {
    if &raw > prev {
        raw
    } else {
        prev.clone()
    }
}

impl LowerReal {
    pub fn constant(q: ExtRational) -> Self {
        LowerReal(Arc::new(LRepr::Const(q)))
    }

    pub fn from_fn(f: impl Fn(u32) -> ExtRational + Send + Sync + 'static) -> Self {
        LowerReal(Arc::new(LRepr::Stream(Stream::new(Box::new(f), keep_max))))
    }

    pub fn bound(&self, stage: u32) -> ExtRational {
        match &*self.0 {
            LRepr::Const(q) => q.clone(),
            LRepr::Stream(s) => s.get(stage),
        }
    }

    pub fn dump(&self, last: u32) -> Vec<BoundEntry> {
        (0..=last)
            .map(|stage| BoundEntry {
                stage,
                bound: self.bound(stage),
            })
            .collect()
    }
}

impl UpperReal {
    /// Negation turns upper bounds into lower bounds.
    pub fn negate(&self) -> LowerReal {
        if let Some(q) = self.as_const() {
            return LowerReal::constant(q.neg());
        }
        let me = self.clone();
        LowerReal::from_fn(move |n| me.bound(n).neg())
    }
}

impl LowerReal {
    pub fn negate(&self) -> UpperReal {
        if let LRepr::Const(q) = &*self.0 {
            return UpperReal::constant(q.neg());
        }
        let me = self.clone();
        UpperReal::from_fn(move |n| me.bound(n).neg())
    }
}
