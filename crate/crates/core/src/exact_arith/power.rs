//! Exact comparison of rational powers and outward-rounded power intervals.
//!
//! Every decision here is exact: `pow_cmp` either compares integer powers
//! directly, recognises a rational-valued power, or separates an irrational
//! power from a rational by interval refinement (which always terminates).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ext::ExtRational;
use crate::error::{Error, Result};

/// Largest result size (in bits) any exact power is allowed to reach.
const MAX_EXACT_BITS: u64 = 1 << 22;
/// Cap for the interval refinement loop in `pow_cmp`.
const MAX_PRECISION: u32 = 1 << 14;

fn bits(n: &BigInt) -> u64 {
    n.bits()
}

fn rat_bits(q: &BigRational) -> u64 {
    bits(q.numer()) + bits(q.denom())
}

fn pow_int(base: &BigInt, e: u64) -> BigInt {
    num_traits::pow(base.clone(), e as usize)
}

fn pow_rat(x: &BigRational, e: u64) -> BigRational {
    BigRational::new(pow_int(x.numer(), e), pow_int(x.denom(), e))
}

/// `2^k` as a rational, `k` may be negative.
pub fn two_pow(k: i64) -> BigRational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Least `k / 2^n >= q`.
pub fn ceil_to_grid(q: &BigRational, n: u32) -> BigRational {
    let scaled = q * two_pow(n as i64);
    BigRational::new(scaled.ceil().to_integer(), BigInt::one() << n)
}

/// Greatest `k / 2^n <= q`.
pub fn floor_to_grid(q: &BigRational, n: u32) -> BigRational {
    let scaled = q * two_pow(n as i64);
    BigRational::new(scaled.floor().to_integer(), BigInt::one() << n)
}

/// Approximate `log2 |n|` for `n != 0`.
fn log2_int(n: &BigInt) -> f64 {
    let b = n.bits();
    if b <= 60 {
        return n.abs().to_f64().unwrap_or(1.0).log2();
    }
    let top = (n.abs() >> (b - 53)).to_f64().unwrap_or(1.0);
    top.log2() + (b - 53) as f64
}

/// Approximate `log2 q` for `q > 0`.
pub(crate) fn log2_approx(q: &BigRational) -> f64 {
    log2_int(q.numer()) - log2_int(q.denom())
}

/// `x^q` when it is rational, for `x > 0`.
pub fn exact_pow(x: &BigRational, q: &BigRational) -> Result<Option<BigRational>> {
    if !x.is_positive() {
        return Err(Error::NonPositiveBase(x.to_string()));
    }
    if q.is_zero() || x.is_one() {
        return Ok(Some(BigRational::one()));
    }
    let (a, b) = (q.numer(), q.denom());
    let root = if b.is_one() {
        x.clone()
    } else {
        let Some(b) = b.to_u32() else {
            return Ok(None);
        };
        let Some(rn) = exact_root(x.numer(), b) else {
            return Ok(None);
        };
        let Some(rd) = exact_root(x.denom(), b) else {
            return Ok(None);
        };
        BigRational::new(rn, rd)
    };
    let e = a.abs().to_u64().ok_or(Error::ExponentTooLarge)?;
    if e.saturating_mul(rat_bits(&root)) > MAX_EXACT_BITS {
        return Err(Error::ExponentTooLarge);
    }
    let p = pow_rat(&root, e);
    Ok(Some(if a.is_negative() { p.recip() } else { p }))
}

fn exact_root(n: &BigInt, b: u32) -> Option<BigInt> {
    if n.is_one() {
        return Some(BigInt::one());
    }
    if b as u64 >= n.bits() {
        return None;
    }
    let r = n.nth_root(b);
    (pow_int(&r, b as u64) == *n).then_some(r)
}

fn ceil_nth_root(n: &BigInt, b: u32) -> BigInt {
    let r = n.nth_root(b);
    if pow_int(&r, b as u64) == *n {
        r
    } else {
        r + 1
    }
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    ceil_nth_root(n, 2)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Interval `[lo, hi]` around `base^e` for `base > 1`, `e > 0`, computed in
/// fixed point with `w` fractional bits and outward rounding.
fn pow_interval_raw(base: &BigRational, e: &BigRational, w: u32) -> Result<(BigRational, BigRational)> {
    let scale = BigInt::one() << w;
    let to_rat = |v: BigInt| BigRational::new(v, scale.clone());
    let (a, b) = (e.numer(), e.denom());

    // integer n-th root route for small denominators
    if let (Some(a64), Some(b32)) = (a.to_u64(), b.to_u32()) {
        if b32 <= 64 && a64.saturating_mul(rat_bits(base)) <= 1 << 16 {
            let n = pow_int(base.numer(), a64) << (w as u64 * b32 as u64);
            let d = pow_int(base.denom(), a64);
            let lo = n.div_floor(&d).nth_root(b32);
            let hi = ceil_nth_root(&ceil_div(&n, &d), b32);
            return Ok((to_rat(lo), to_rat(hi)));
        }
    }

    let int_part = e.floor().to_integer();
    let frac = e - BigRational::from_integer(int_part.clone());
    let int_e = int_part.to_u64().ok_or(Error::ExponentTooLarge)?;
    if int_e.saturating_mul(rat_bits(base)) > MAX_EXACT_BITS {
        return Err(Error::ExponentTooLarge);
    }
    let whole = pow_rat(base, int_e);

    // dyadic exponent bits: exact when the denominator is a power of two
    let den = frac.denom();
    let exact_dyadic = den.is_one() || (den.trailing_zeros() == Some(den.bits() - 1) && den.bits() <= 4096);
    let d = if exact_dyadic {
        den.bits() as u32 - 1
    } else {
        w + 8
    };
    let grid = BigRational::from_integer(BigInt::one() << d);
    let f_lo = (&frac * &grid).floor().to_integer();
    let f_hi = (&frac * &grid).ceil().to_integer();

    // root chain base^(2^-i), i = 1..=d
    let mut lo_acc = scale.clone();
    let mut hi_acc = scale.clone();
    let mut r_lo = (base.numer() << w).div_floor(base.denom());
    let mut r_hi = ceil_div(&(base.numer() << w), base.denom());
    for i in 1..=d {
        r_lo = (&r_lo << w).sqrt();
        r_hi = ceil_sqrt(&(&r_hi << w));
        let bit = d - i;
        if f_lo.bit(bit as u64) {
            lo_acc = (&lo_acc * &r_lo) >> w;
        }
        if f_hi.bit(bit as u64) {
            hi_acc = ceil_div(&(&hi_acc * &r_hi), &scale);
        }
    }
    // f_hi may have carried into 2^d (frac rounded up to 1)
    if f_hi.bits() as u32 > d {
        hi_acc = ceil_div(&(&hi_acc * ceil_div(&(base.numer() << w), base.denom())), &scale);
    }
    Ok((&whole * to_rat(lo_acc), &whole * to_rat(hi_acc)))
}

/// Interval `[lo, hi]` containing `x^q` with `hi - lo <= 2^-prec`; a single
/// point exactly when the power is rational.
pub fn pow_interval(x: &BigRational, q: &BigRational, prec: u32) -> Result<(BigRational, BigRational)> {
    if let Some(v) = exact_pow(x, q)? {
        return Ok((v.clone(), v));
    }
    let (base, e) = if x > &BigRational::one() {
        (x.clone(), q.clone())
    } else {
        (x.recip(), -q)
    };
    let negative = e.is_negative();
    let e = e.abs();
    let magnitude = (e.to_f64().unwrap_or(f64::MAX) * log2_approx(&base)).max(0.0);
    if magnitude > MAX_EXACT_BITS as f64 {
        return Err(Error::ExponentTooLarge);
    }
    let tol = two_pow(-(prec as i64));
    let mut w = prec + magnitude.ceil() as u32 + 16;
    loop {
        let (lo, hi) = pow_interval_raw(&base, &e, w)?;
        let (lo, hi) = if negative {
            (hi.recip(), lo.recip())
        } else {
            (lo, hi)
        };
        if &hi - &lo <= tol {
            return Ok((lo, hi));
        }
        if w > MAX_PRECISION + prec {
            return Err(Error::PrecisionExhausted);
        }
        w *= 2;
    }
}

/// Exact order of `m^e` against `q`, for `m, q > 0`.
pub fn pow_cmp(m: &BigRational, e: &BigRational, q: &BigRational) -> Result<Ordering> {
    if !m.is_positive() {
        return Err(Error::NonPositiveBase(m.to_string()));
    }
    if !q.is_positive() {
        return Err(Error::NonPositiveBase(q.to_string()));
    }
    if e.is_zero() || m.is_one() {
        return Ok(BigRational::one().cmp(q));
    }
    // negative exponents go through the reciprocal base
    let (base, a) = if e.is_negative() {
        (m.recip(), -e.numer())
    } else {
        (m.clone(), e.numer().clone())
    };
    let b = e.denom();
    if let (Some(a), Some(b)) = (a.to_u64(), b.to_u64()) {
        let cost = a.saturating_mul(rat_bits(&base)).saturating_add(b.saturating_mul(rat_bits(q)));
        if cost <= 1 << 18 {
            // base^a vs q^b, cross-multiplied in integers
            let lhs = pow_int(base.numer(), a) * pow_int(q.denom(), b);
            let rhs = pow_int(q.numer(), b) * pow_int(base.denom(), a);
            return Ok(lhs.cmp(&rhs));
        }
    }
    if let Some(v) = exact_pow(m, e)? {
        return Ok(v.cmp(q));
    }
    let mut prec = 32u32;
    loop {
        let (lo, hi) = pow_interval(m, e, prec)?;
        if &hi < q {
            return Ok(Ordering::Less);
        }
        if &lo > q {
            return Ok(Ordering::Greater);
        }
        if prec > MAX_PRECISION {
            return Err(Error::PrecisionExhausted);
        }
        prec *= 2;
    }
}

/// Exact `x^q` if rational, otherwise the least `k / 2^n` above it.
pub fn pow_upper(x: &BigRational, q: &BigRational, n: u32) -> Result<BigRational> {
    if let Some(v) = exact_pow(x, q)? {
        return Ok(v);
    }
    let (lo, _) = pow_interval(x, q, n + 2)?;
    let k = ceil_to_grid(&lo, n);
    if pow_cmp(x, q, &k)? == Ordering::Greater {
        Ok(k + two_pow(-(n as i64)))
    } else {
        Ok(k)
    }
}

/// Exact `x^q` if rational, otherwise the greatest `k / 2^n` below it.
pub fn pow_lower(x: &BigRational, q: &BigRational, n: u32) -> Result<BigRational> {
    if let Some(v) = exact_pow(x, q)? {
        return Ok(v);
    }
    let (_, hi) = pow_interval(x, q, n + 2)?;
    let k = floor_to_grid(&hi, n);
    if k.is_positive() && pow_cmp(x, q, &k)? == Ordering::Less {
        Ok(k - two_pow(-(n as i64)))
    } else {
        Ok(k.max(BigRational::zero()))
    }
}

/// Least `k` in `[kmin, kmax]` with `pred(k)`, assuming `pred` is monotone
/// (false then true). `None` if `pred(kmax)` fails.
fn least_true(
    mut pred: impl FnMut(&BigInt) -> Result<bool>,
    guess: BigInt,
    kmin: &BigInt,
    kmax: &BigInt,
) -> Result<Option<BigInt>> {
    if !pred(kmax)? {
        return Ok(None);
    }
    if pred(kmin)? {
        return Ok(Some(kmin.clone()));
    }
    // invariant: !pred(lo), pred(hi)
    let guess = guess.clamp(kmin.clone(), kmax.clone());
    let (mut lo, mut hi);
    if pred(&guess)? {
        hi = guess;
        let mut step = BigInt::one();
        loop {
            let cand = (&hi - &step).max(kmin.clone());
            if !pred(&cand)? {
                lo = cand;
                break;
            }
            hi = cand;
            step <<= 1;
        }
    } else {
        lo = guess;
        let mut step = BigInt::one();
        loop {
            let cand = (&lo + &step).min(kmax.clone());
            if pred(&cand)? {
                hi = cand;
                break;
            }
            lo = cand;
            step <<= 1;
        }
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if pred(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn log_window(n: u32) -> (BigInt, BigInt) {
    let edge = BigInt::from(64u64 * (n as u64 + 1)) << n;
    (-edge.clone(), edge)
}

fn grid_point(k: BigInt, n: u32) -> BigRational {
    BigRational::new(k, BigInt::one() << n)
}

fn check_log_base(m: &BigInt) -> Result<BigRational> {
    if m < &BigInt::from(2) {
        return Err(Error::BadBase(m.to_string()));
    }
    Ok(BigRational::from_integer(m.clone()))
}

/// Least `k / 2^n` with `m^(k/2^n) >= y`, searched in the value window
/// `[-64(n+1), 64(n+1)]`. Above the window the answer is `+inf`; below it
/// the lower window edge is returned. `y = 0` gives `-inf`.
pub fn log_upper(m: &BigInt, y: &BigRational, n: u32) -> Result<ExtRational> {
    let base = check_log_base(m)?;
    if y.is_negative() {
        return Err(Error::NonPositiveBase(y.to_string()));
    }
    if y.is_zero() {
        return Ok(ExtRational::NegInf);
    }
    let (kmin, kmax) = log_window(n);
    let est = log2_approx(y) / log2_int(m) * (n as f64).exp2();
    let guess = BigInt::from(est.ceil().clamp(-1e300, 1e300) as i128);
    let found = least_true(
        |k| Ok(pow_cmp(&base, &grid_point(k.clone(), n), y)? != Ordering::Less),
        guess,
        &kmin,
        &kmax,
    )?;
    Ok(match found {
        Some(k) => ExtRational::Finite(grid_point(k, n)),
        None => ExtRational::PosInf,
    })
}

/// Greatest `k / 2^n` with `m^(k/2^n) <= y` (same window; `-inf` for `y = 0`
/// or below the window, `+inf` above it).
pub fn log_lower(m: &BigInt, y: &BigRational, n: u32) -> Result<ExtRational> {
    let base = check_log_base(m)?;
    if y.is_negative() {
        return Err(Error::NonPositiveBase(y.to_string()));
    }
    if y.is_zero() {
        return Ok(ExtRational::NegInf);
    }
    let (kmin, kmax) = log_window(n);
    let est = log2_approx(y) / log2_int(m) * (n as f64).exp2();
    let guess = BigInt::from(est.floor().clamp(-1e300, 1e300) as i128);
    let found = least_true(
        |k| Ok(pow_cmp(&base, &grid_point(k.clone(), n), y)? == Ordering::Greater),
        guess + 1,
        &kmin,
        &kmax,
    )?;
    Ok(match found {
        Some(k) if k == kmin => ExtRational::NegInf,
        Some(k) => ExtRational::Finite(grid_point(k - 1, n)),
        None => ExtRational::PosInf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pow_cmp_examples() {
        // 2^(1/2) vs 3/2: 2^1 = 2 < 9/4 = (3/2)^2
        assert_eq!(pow_cmp(&r(2, 1), &r(1, 2), &r(3, 2)).unwrap(), Ordering::Less);
        assert_eq!(pow_cmp(&r(4, 1), &r(1, 2), &r(2, 1)).unwrap(), Ordering::Equal);
        assert_eq!(pow_cmp(&r(5, 1), &r(0, 1), &r(1, 1)).unwrap(), Ordering::Equal);
        assert_eq!(pow_cmp(&r(1, 3), &r(-1, 1), &r(3, 1)).unwrap(), Ordering::Equal);
        assert!(matches!(
            pow_cmp(&r(0, 1), &r(1, 2), &r(1, 1)),
            Err(Error::NonPositiveBase(_))
        ));
    }

    #[test]
    fn pow_cmp_huge_dyadic_exponent() {
        // 2^(2^29 / 2^30) = sqrt 2, reduced to 1/2 by canonicalisation
        let e = BigRational::new(BigInt::one() << 29, BigInt::one() << 30);
        assert_eq!(pow_cmp(&r(4, 1), &e, &r(2, 1)).unwrap(), Ordering::Equal);
        // 2^((2^30+1)/2^30) is just above 2
        let e = BigRational::new((BigInt::one() << 30) + 1, BigInt::one() << 30);
        assert_eq!(pow_cmp(&r(2, 1), &e, &r(2, 1)).unwrap(), Ordering::Greater);
        let e = BigRational::new((BigInt::one() << 30) - 1, BigInt::one() << 30);
        assert_eq!(pow_cmp(&r(2, 1), &e, &r(2, 1)).unwrap(), Ordering::Less);
    }

    #[test]
    fn intervals_contain_the_power() {
        for (x, q) in [(r(2, 1), r(1, 3)), (r(10, 1), r(-1, 2)), (r(1, 7), r(5, 4)), (r(3, 2), r(1_000_001, 1 << 20))] {
            let (lo, hi) = pow_interval(&x, &q, 40).unwrap();
            assert!(lo <= hi);
            assert!(&hi - &lo <= two_pow(-40));
            // cross-check endpoints against exact comparisons
            assert_ne!(pow_cmp(&x, &q, &lo).unwrap(), Ordering::Less);
            assert_ne!(pow_cmp(&x, &q, &hi).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn upper_and_lower_on_the_grid() {
        let up = pow_upper(&r(2, 1), &r(1, 2), 20).unwrap();
        let lo = pow_lower(&r(2, 1), &r(1, 2), 20).unwrap();
        assert_eq!(&up - &lo, two_pow(-20));
        assert_eq!(pow_cmp(&r(2, 1), &r(1, 2), &up).unwrap(), Ordering::Less);
        assert_eq!(pow_cmp(&r(2, 1), &r(1, 2), &lo).unwrap(), Ordering::Greater);
        assert_eq!(pow_upper(&r(3, 1), &r(-1, 1), 20).unwrap(), r(1, 3));
    }

    #[test]
    fn log_examples() {
        let two = BigInt::from(2);
        assert_eq!(log_upper(&two, &r(8, 1), 10).unwrap(), ExtRational::from_int(3));
        assert_eq!(
            log_upper(&BigInt::from(5), &r(1, 5), 10).unwrap(),
            ExtRational::from_int(-1)
        );
        assert_eq!(log_upper(&two, &r(0, 1), 10).unwrap(), ExtRational::NegInf);
        assert!(matches!(log_upper(&BigInt::from(1), &r(2, 1), 3), Err(Error::BadBase(_))));
        // log2 3 in (1.5849, 1.5850)
        let up = log_upper(&two, &r(3, 1), 20).unwrap();
        let lo = log_lower(&two, &r(3, 1), 20).unwrap();
        let (up, lo) = (up.finite().unwrap().clone(), lo.finite().unwrap().clone());
        assert_eq!(&up - &lo, two_pow(-20));
        assert!(up > r(15849, 10000) && lo < r(15850, 10000));
    }

    #[test]
    fn log_window_edges() {
        let two = BigInt::from(2);
        let huge = BigRational::from_integer(BigInt::one() << 400);
        assert_eq!(log_upper(&two, &huge, 1).unwrap(), ExtRational::PosInf);
        let tiny = huge.recip();
        assert_eq!(log_upper(&two, &tiny, 1).unwrap(), ExtRational::from_int(-128));
    }
}
