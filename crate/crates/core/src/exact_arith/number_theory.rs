use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Extended Euclid: returns `(g, x, y)` with `g = gcd(|a|, |b|) > 0` and
/// `a*x + b*y = g`.
pub fn gcd_bezout(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// Deterministic trial division up to the integer square root.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let limit = n.sqrt();
    let mut d = BigInt::from(3u32);
    while d <= limit {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2u32;
    }
    true
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization of `|n|`, ascending primes with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization(pub Vec<(BigInt, u32)>);

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.0.iter().map(|(p, _)| p)
    }

    pub fn multiply_out(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn factorize(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut push = |rest: &mut BigInt, d: &BigInt| {
        let mut e = 0u32;
        while (&*rest % d).is_zero() {
            *rest /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
    };
    push(&mut rest, &BigInt::from(2u32));
    let mut d = BigInt::from(3u32);
    while &d * &d <= rest {
        push(&mut rest, &d);
        d += 2u32;
    }
    if rest > BigInt::one() {
        out.push((rest, 1));
    }
    Ok(Factorization(out))
}

/// Least prime factor of `|n|`, `None` for `|n| <= 1`.
pub fn least_prime_factor(n: &BigInt) -> Option<BigInt> {
    if n.abs() <= BigInt::one() {
        return None;
    }
    factorize(n).ok()?.0.into_iter().next().map(|(p, _)| p)
}

/// Exponent of the prime `p` in `n`.
pub fn ord_p(p: &BigInt, n: &BigInt) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(ord_unchecked(p, n))
}

/// `ord_p` without the primality check; `p > 1`, `n != 0`.
pub(crate) fn ord_unchecked(p: &BigInt, n: &BigInt) -> u64 {
    let mut rest = n.abs();
    let mut k = 0u64;
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        rest = q;
        k += 1;
    }
}

/// Sieve of Eratosthenes, ascending primes `<= k`.
pub fn primes_upto(k: u64) -> Vec<BigInt> {
    if k < 2 {
        return Vec::new();
    }
    let k = k as usize;
    let mut composite = vec![false; k + 1];
    let mut i = 2usize;
    while i * i <= k {
        if !composite[i] {
            let mut j = i * i;
            while j <= k {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=k)
        .filter(|&n| !composite[n])
        .map(BigInt::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(gcd_bezout(&bi(5), &bi(0)).unwrap(), (bi(5), bi(1), bi(0)));
        for (a, b, g) in [(12, 18, 6), (35, 64, 1), (-12, 18, 6), (0, -7, 7)] {
            let (gg, x, y) = gcd_bezout(&bi(a), &bi(b)).unwrap();
            assert_eq!(gg, bi(g));
            assert_eq!(bi(a) * x + bi(b) * y, gg);
        }
        assert_eq!(gcd_bezout(&bi(0), &bi(0)), Err(Error::BothZero));
    }

    #[test]
    fn bezout_witness_for_12_18_exists_in_small_box() {
        // exhaustive oracle over |x|,|y| <= 3
        let found = (-3..=3)
            .flat_map(|x| (-3..=3).map(move |y| (x, y)))
            .any(|(x, y)| 12 * x + 18 * y == 6);
        assert!(found);
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(&bi(1)).unwrap().is_empty());
        assert_eq!(
            factorize(&bi(360)).unwrap().0,
            vec![(bi(2), 3), (bi(3), 2), (bi(5), 1)]
        );
        assert_eq!(factorize(&bi(-17)).unwrap().0, vec![(bi(17), 1)]);
        assert_eq!(factorize(&bi(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn factorize_round_trips_up_to_ten_thousand() {
        for n in 1..=10_000i64 {
            let f = factorize(&bi(n)).unwrap();
            assert_eq!(f.multiply_out(), bi(n));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord_p(&bi(3), &bi(162)).unwrap(), 4);
        assert_eq!(ord_p(&bi(5), &bi(7)).unwrap(), 0);
        assert_eq!(ord_p(&bi(2), &bi(-8)).unwrap(), 3);
        assert_eq!(ord_p(&bi(4), &bi(8)), Err(Error::NotPrime("4".into())));
        assert_eq!(ord_p(&bi(2), &bi(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn sieve_examples() {
        assert!(primes_upto(1).is_empty());
        assert_eq!(primes_upto(10), vec![bi(2), bi(3), bi(5), bi(7)]);
        let by_trial: Vec<BigInt> = (0..=30).map(bi).filter(is_prime).collect();
        assert_eq!(primes_upto(30), by_trial);
    }

    #[test]
    fn primality_large_u64() {
        assert!(is_prime(&bi(1_000_000_007)));
        assert!(!is_prime(&(bi(1_000_000_007) * bi(3))));
        assert!(!is_prime(&bi(-7)));
    }
}
