//! Exponentials and logarithms on one-sided and Dedekind reals.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dedekind::{refine, DedekindReal};
use super::upper::{magnitude_bits, UpperReal, COARSE_STAGE};
use crate::error::{Error, Result};
use crate::exact_arith::{exact_pow, log_lower, log_upper, pow_lower, pow_upper, ExtRational};

/// Cap on how far `upper_log` will push its input stage.
const MAX_LOG_BOOST: u32 = 600;

fn upper_pow_bound(base: &BigRational, base_lo: &BigRational, exp: &ExtRational, n: u32) -> ExtRational {
    match exp {
        ExtRational::PosInf if base.is_one() => ExtRational::one(),
        ExtRational::PosInf => ExtRational::PosInf,
        ExtRational::NegInf if base_lo > &BigRational::one() => ExtRational::zero(),
        ExtRational::NegInf => ExtRational::one(),
        ExtRational::Finite(q) => pow_upper(base, q, n)
            .map(ExtRational::Finite)
            .unwrap_or(ExtRational::PosInf),
    }
}

/// `x^lambda` for a Dedekind base `x >= 1` and an upper-real exponent.
///
/// Stage `n` raises the top of `x` to the exponent bound, both read at a
/// boosted stage, and rounds up to the `2^-n` grid unless the power is an
/// exact rational.
pub fn upper_exp(x: &DedekindReal, lambda: &UpperReal) -> Result<UpperReal> {
    if x.certify_below(&BigRational::one(), 20).is_some() {
        return Err(Error::BaseBelowOne);
    }
    if lambda.is_zero_token() {
        return Ok(UpperReal::one());
    }
    if let (Some(c), Some(l)) = (x.as_const(), lambda.as_const()) {
        if c.is_one() {
            return Ok(UpperReal::one());
        }
        match l {
            ExtRational::NegInf => return Ok(UpperReal::zero()),
            ExtRational::PosInf => return Ok(UpperReal::pos_inf()),
            ExtRational::Finite(q) => {
                if let Ok(Some(v)) = exact_pow(c, q) {
                    return Ok(UpperReal::constant(ExtRational::Finite(v)));
                }
                let (c, q) = (c.clone(), q.clone());
                return Ok(UpperReal::from_fn(move |n| {
                    pow_upper(&c, &q, n)
                        .map(ExtRational::Finite)
                        .unwrap_or(ExtRational::PosInf)
                }));
            }
        }
    }
    let (x, lambda) = (x.clone(), lambda.clone());
    let boost = Mutex::new(None::<u32>);
    Ok(UpperReal::from_fn(move |n| {
        let g = *boost.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert_with(|| {
            let hi = x.hi(COARSE_STAGE).max(BigRational::one());
            let lb = lambda.bound(COARSE_STAGE);
            let value = upper_pow_bound(&hi, &hi, &lb, 0);
            let slope = magnitude_bits(&lb) + magnitude_bits(&ExtRational::Finite(hi)) + 1;
            3 + magnitude_bits(&value) + slope
        });
        let k = n + g;
        let (lo, hi) = x.interval(k);
        let hi = hi.max(BigRational::one());
        upper_pow_bound(&hi, &lo, &lambda.bound(k), n)
    }))
}

/// `log_m u` for an integer base `m >= 2` and a non-negative upper real.
///
/// Stage `n` is the least `k/2^n` with `m^(k/2^n)` at least the bound of `u`,
/// read at a stage fine enough that its relative error stays below `2^-n`.
pub fn upper_log(m: &BigInt, u: &UpperReal) -> Result<UpperReal> {
    if m < &BigInt::from(2) {
        return Err(Error::BadBase(m.to_string()));
    }
    if u.bound(0).is_negative() {
        return Err(Error::NegativeBound);
    }
    if u.is_zero_token() {
        return Ok(UpperReal::constant(ExtRational::NegInf));
    }
    let m = m.clone();
    match u.as_const() {
        Some(ExtRational::PosInf) => Ok(UpperReal::pos_inf()),
        Some(ExtRational::Finite(c)) => {
            let c = c.clone();
            Ok(UpperReal::from_fn(move |n| log_upper(&m, &c, n).unwrap_or(ExtRational::PosInf)))
        }
        _ => {
            let u = u.clone();
            Ok(UpperReal::from_fn(move |n| {
                let mut k = n + 2;
                loop {
                    let b = match u.bound(k) {
                        ExtRational::Finite(b) => b.max(BigRational::zero()),
                        other => return other,
                    };
                    if b.is_zero() {
                        return ExtRational::NegInf;
                    }
                    // relative error of b is below 2^-k / b
                    let small = (-crate::exact_arith::log2_approx(&b)).max(0.0).ceil() as u32;
                    let need = n + 3 + small;
                    if need <= k || k >= n + MAX_LOG_BOOST {
                        return log_upper(&m, &b, n).unwrap_or(ExtRational::PosInf);
                    }
                    k = need.min(n + MAX_LOG_BOOST);
                }
            }))
        }
    }
}

/// `r^beta` for a positive rational `r` and a Dedekind exponent.
pub fn ded_pow_rat(r: &BigRational, beta: &DedekindReal) -> Result<DedekindReal> {
    if !r.is_positive() {
        return Err(Error::NonPositiveBase(r.to_string()));
    }
    if r.is_one() {
        return Ok(DedekindReal::from_int(1));
    }
    if let Some(b) = beta.as_const() {
        if let Some(v) = exact_pow(r, b)? {
            return Ok(DedekindReal::from_rational(v));
        }
        let (r, b) = (r.clone(), b.clone());
        return Ok(DedekindReal::from_fn(move |n| {
            refine(n, 0, |k| Ok((pow_lower(&r, &b, k + 1)?, pow_upper(&r, &b, k + 1)?)))
        }));
    }
    let (r, beta) = (r.clone(), beta.clone());
    let increasing = r > BigRational::one();
    Ok(DedekindReal::from_fn(move |n| {
        refine(n, 0, |k| {
            let (blo, bhi) = beta.interval(k);
            let (e_lo, e_hi) = if increasing { (blo, bhi) } else { (bhi, blo) };
            Ok((pow_lower(&r, &e_lo, n + 2)?, pow_upper(&r, &e_hi, n + 2)?))
        })
    }))
}

/// `x^q` for a positive Dedekind base and a rational exponent.
pub fn ded_powq(x: &DedekindReal, q: &BigRational) -> Result<DedekindReal> {
    if q.is_zero() {
        return Ok(DedekindReal::from_int(1));
    }
    if let Some(c) = x.as_const() {
        return ded_pow_rat(c, &DedekindReal::from_rational(q.clone()));
    }
    let start = x
        .certify_above(&BigRational::zero(), 64)
        .ok_or_else(|| Error::NonPositiveBase("Dedekind base".into()))?;
    let (x, q) = (x.clone(), q.clone());
    Ok(DedekindReal::from_fn(move |n| {
        refine(n, start, |k| {
            let (lo, hi) = x.interval(k);
            let (b_lo, b_hi) = if q.is_positive() { (lo, hi) } else { (hi, lo) };
            Ok((pow_lower(&b_lo, &q, n + 2)?, pow_upper(&b_hi, &q, n + 2)?))
        })
    }))
}

/// `log_m x` for a positive Dedekind real.
pub fn ded_log(m: &BigInt, x: &DedekindReal) -> Result<DedekindReal> {
    if m < &BigInt::from(2) {
        return Err(Error::BadBase(m.to_string()));
    }
    let start = x
        .certify_above(&BigRational::zero(), 64)
        .ok_or_else(|| Error::NonPositiveBase("Dedekind argument".into()))?;
    let (m, x) = (m.clone(), x.clone());
    Ok(DedekindReal::from_fn(move |n| {
        refine(n, start, |k| {
            let (lo, hi) = x.interval(k);
            match (log_lower(&m, &lo, n + 1)?, log_upper(&m, &hi, n + 1)?) {
                (ExtRational::Finite(a), ExtRational::Finite(b)) => Ok((a, b)),
                _ => Err(Error::PrecisionExhausted),
            }
        })
    }))
}

/// Lossy `f64` view of a bound, for diagnostics and text output.
pub fn approx_f64(q: &ExtRational) -> f64 {
    match q {
        ExtRational::NegInf => f64::NEG_INFINITY,
        ExtRational::PosInf => f64::INFINITY,
        ExtRational::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
    }
}
