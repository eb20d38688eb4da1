use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::closed_form::{prime_power, ClosedForm, Exponent};
use crate::error::{Error, Result};
use crate::exact_arith::{ord_unchecked, ExtRational};
use crate::onesided::{ded_div, ded_pow_rat, upper_exp, DedekindReal, UpperReal};

type Evaluator = dyn Fn(&BigInt) -> UpperReal + Send + Sync;

/// An absolute value on Z: an upper real for every integer, optionally
/// described by a closed form.
///
/// The wrapper enforces `|0| = 0`, `|1| = |-1| = 1` and `|-n| = |n|`
/// whatever the underlying evaluator does; per-integer values are cached.
#[derive(Clone)]
pub struct AbsValue {
    eval: Arc<Evaluator>,
    descriptor: Option<ClosedForm>,
    cache: Arc<Mutex<HashMap<BigInt, UpperReal>>>,
}

impl AbsValue {
    /// Absolute value given only by an oracle.
    pub fn from_oracle(f: impl Fn(&BigInt) -> UpperReal + Send + Sync + 'static) -> Self {
        AbsValue {
            eval: Arc::new(f),
            descriptor: None,
            cache: Arc::default(),
        }
    }

    /// Attaches a closed form that the evaluator claims to follow. Nothing
    /// checks the claim here; the axiom checks do.
    pub fn with_descriptor(mut self, descriptor: ClosedForm) -> Self {
        self.descriptor = Some(descriptor);
        self
    }

    pub fn descriptor(&self) -> Option<&ClosedForm> {
        self.descriptor.as_ref()
    }

    /// `|n|` as an upper real.
    pub fn value(&self, n: &BigInt) -> UpperReal {
        if n.is_zero() {
            return UpperReal::zero();
        }
        let n = n.abs();
        if n.is_one() {
            return UpperReal::one();
        }
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        cache.entry(n.clone()).or_insert_with(|| (self.eval)(&n)).clone()
    }

    /// Stage bound of `|n|`.
    pub fn eval(&self, n: &BigInt, stage: u32) -> ExtRational {
        self.value(n).bound(stage)
    }
}

impl fmt::Debug for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.descriptor {
            Some(d) => write!(f, "AbsValue({d})"),
            None => f.write_str("AbsValue(<oracle>)"),
        }
    }
}

pub fn av_eval(av: &AbsValue, n: &BigInt, stage: u32) -> ExtRational {
    av.eval(n, stage)
}

fn int_const(n: BigInt) -> UpperReal {
    UpperReal::constant(ExtRational::from(n))
}

/// `base^lambda` as an upper real, `base >= 1` an integer.
fn int_power(base: BigRational, lambda: &Exponent) -> UpperReal {
    upper_exp(&DedekindReal::from_rational(base), &lambda.upper()).unwrap_or_else(|_| UpperReal::pos_inf())
}

/// Builds the standard absolute value for a closed form.
pub fn make_standard(kind: &ClosedForm) -> Result<AbsValue> {
    kind.validate()?;
    let eval: Box<Evaluator> = match kind.clone() {
        ClosedForm::Trivial => Box::new(|_| UpperReal::one()),
        ClosedForm::Euclid => Box::new(|n| int_const(n.clone())),
        ClosedForm::Padic(p) => Box::new(move |n| {
            let k = ord_unchecked(&p, n);
            UpperReal::constant(ExtRational::Finite(prime_power(&p, k).recip()))
        }),
        ClosedForm::PChar(p) => Box::new(move |n| {
            if n.is_multiple_of(&p) {
                UpperReal::zero()
            } else {
                UpperReal::one()
            }
        }),
        ClosedForm::Power { inner, lambda } => match *inner {
            ClosedForm::Euclid => Box::new(move |n| int_power(BigRational::from_integer(n.clone()), &lambda)),
            ClosedForm::Padic(p) => Box::new(move |n| {
                let k = ord_unchecked(&p, n);
                int_power(prime_power(&p, k), &lambda)
            }),
            _ => unreachable!("validated"),
        },
    };
    Ok(AbsValue {
        eval: Arc::from(eval),
        descriptor: Some(kind.clone()),
        cache: Arc::default(),
    })
}

/// `|n|` as a Dedekind real, read off the closed form.
pub fn dedekindize(av: &AbsValue, n: &BigInt) -> Result<DedekindReal> {
    let kind = av.descriptor().ok_or(Error::NoClosedForm)?;
    closed_form_value(kind, n)
}

fn closed_form_value(kind: &ClosedForm, n: &BigInt) -> Result<DedekindReal> {
    if n.is_zero() {
        return Ok(DedekindReal::from_int(0));
    }
    let n = n.abs();
    let rat = |q: BigRational| Ok(DedekindReal::from_rational(q));
    match kind {
        ClosedForm::Trivial => rat(BigRational::one()),
        ClosedForm::Euclid => rat(BigRational::from_integer(n)),
        ClosedForm::Padic(p) => rat(prime_power(p, ord_unchecked(p, &n)).recip()),
        ClosedForm::PChar(p) => rat(if n.is_multiple_of(p) {
            BigRational::zero()
        } else {
            BigRational::one()
        }),
        ClosedForm::Power { inner, lambda } => {
            let base = match &**inner {
                ClosedForm::Euclid => BigRational::from_integer(n),
                ClosedForm::Padic(p) => prime_power(p, ord_unchecked(p, &n)),
                _ => return Err(Error::BadParameter("unsupported power".into())),
            };
            match lambda {
                Exponent::Exact(ExtRational::Finite(q)) => {
                    ded_pow_rat(&base, &DedekindReal::from_rational(q.clone()))
                }
                Exponent::Exact(ExtRational::NegInf) => rat(if base.is_one() {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }),
                Exponent::Exact(ExtRational::PosInf) => {
                    Err(Error::BadParameter("lambda = +inf".into()))
                }
                Exponent::Real(d) => ded_pow_rat(&base, d),
            }
        }
    }
}

/// Extends a positive-definite closed-form absolute value to Q via
/// `|m/n| = |m| / |n|`.
pub fn extend_to_q(av: &AbsValue, x: &BigRational) -> Result<DedekindReal> {
    if x.is_zero() {
        return Ok(DedekindReal::from_int(0));
    }
    let num = dedekindize(av, x.numer())?;
    let den = dedekindize(av, x.denom())?;
    ded_div(&num, &den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::two_pow;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn q(n: i64, d: i64) -> ExtRational {
        ExtRational::from_ratio(n, d)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn standard_values() {
        let t = make_standard(&ClosedForm::Trivial).unwrap();
        assert_eq!(t.eval(&bi(10), 0), q(1, 1));
        let p3 = make_standard(&ClosedForm::padic(3)).unwrap();
        assert_eq!(p3.eval(&bi(162), 0), q(1, 81));
        let c2 = make_standard(&ClosedForm::pchar(2)).unwrap();
        assert_eq!(c2.eval(&bi(6), 0), q(0, 1));
        assert_eq!(c2.eval(&bi(5), 0), q(1, 1));
        let e = make_standard(&ClosedForm::Euclid).unwrap();
        assert_eq!(av_eval(&e, &bi(-7), 3), q(7, 1));
        let p5 = make_standard(&ClosedForm::padic(5)).unwrap();
        assert_eq!(av_eval(&p5, &bi(5), 9), q(1, 5));
        assert!(make_standard(&ClosedForm::padic(4)).is_err());
    }

    #[test]
    fn sqrt_two_on_the_grid() {
        let half = make_standard(&ClosedForm::power(ClosedForm::Euclid, q(1, 2))).unwrap();
        let b = half.eval(&bi(2), 20);
        let b = b.finite().unwrap().clone();
        assert!(&b * &b >= r(2, 1));
        let below = &b - two_pow(-20);
        assert!(&below * &below < r(2, 1));
    }

    #[test]
    fn axioms_at_zero_and_one() {
        let oracle = AbsValue::from_oracle(|_| UpperReal::constant(q(5, 1)));
        assert!(oracle.value(&bi(0)).is_zero_token());
        assert!(oracle.value(&bi(-1)).is_one_token());
        assert_eq!(oracle.eval(&bi(-3), 0), oracle.eval(&bi(3), 0));
    }

    #[test]
    fn dedekindize_examples() {
        let p5 = make_standard(&ClosedForm::padic(5)).unwrap();
        assert_eq!(dedekindize(&p5, &bi(10)).unwrap().as_const(), Some(&r(1, 5)));
        let half = make_standard(&ClosedForm::power(ClosedForm::Euclid, q(1, 2))).unwrap();
        assert_eq!(dedekindize(&half, &bi(9)).unwrap().as_const(), Some(&r(3, 1)));
        let t = make_standard(&ClosedForm::Trivial).unwrap();
        assert_eq!(dedekindize(&t, &bi(-4)).unwrap().as_const(), Some(&r(1, 1)));
        let oracle = AbsValue::from_oracle(|_| UpperReal::one());
        assert_eq!(dedekindize(&oracle, &bi(2)).unwrap_err(), Error::NoClosedForm);
    }

    #[test]
    fn extension_to_rationals() {
        let e = make_standard(&ClosedForm::Euclid).unwrap();
        assert_eq!(extend_to_q(&e, &r(2, 3)).unwrap().interval(5), (r(2, 3), r(2, 3)));
        let p3 = make_standard(&ClosedForm::padic(3)).unwrap();
        assert_eq!(extend_to_q(&p3, &r(4, 9)).unwrap().interval(5), (r(9, 1), r(9, 1)));
        assert_eq!(extend_to_q(&p3, &r(0, 1)).unwrap().interval(5), (r(0, 1), r(0, 1)));
        let c3 = make_standard(&ClosedForm::pchar(3)).unwrap();
        assert_eq!(extend_to_q(&c3, &r(1, 3)).unwrap_err(), Error::ZeroDenominator);
    }
}
