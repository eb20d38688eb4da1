//! Property tests. Oracles are exact integer computations written here,
//! independent of the library's own power and log routines.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use ostrowski_core::absval::{
    check_ultrametric, dedekindize, detect_na, make_standard, ClosedForm, NaDetection, Verdict, Window,
};
use ostrowski_core::exact_arith::{
    gcd_bezout, log_upper, ord_p, pow_cmp, pow_lower, pow_upper, two_pow, ExtRational,
};
use ostrowski_core::onesided::{ded_log, ded_pow_rat, upper_exp, upper_log, DedekindReal, UpperReal};
use ostrowski_core::ostrowski::{classify, reconstruct};
use ostrowski_core::spectra::{detect_ideal, PrimeIdealZ};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ipow(x: &BigRational, k: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Sign of `x^(a/b) - y` for positive `x`, `y`, decided as `x^a` vs `y^b`.
fn oracle_cmp(x: &BigRational, q: &BigRational, y: &BigRational) -> Ordering {
    let a = i64::try_from(q.numer()).unwrap();
    let b = i64::try_from(q.denom()).unwrap();
    ipow(x, a).cmp(&ipow(y, b))
}

fn small_prime() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![2i64, 3, 5, 7, 11, 13])
}

fn finite(e: ExtRational) -> BigRational {
    e.finite().cloned().expect("finite bound")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn bezout_identity(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
        prop_assume!(a != 0 || b != 0);
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let (g, x, y) = gcd_bezout(&a, &b).unwrap();
        prop_assert_eq!(&g, &a.gcd(&b));
        prop_assert!(g.is_positive());
        prop_assert!(a.is_multiple_of(&g) && b.is_multiple_of(&g));
        prop_assert_eq!(&a * x + &b * y, g);
    }

    #[test]
    fn ord_is_additive(n in 1i64..100_000, m in 1i64..100_000, p in small_prime(), sn in any::<bool>()) {
        let (n, m, p) = (BigInt::from(if sn { -n } else { n }), BigInt::from(m), BigInt::from(p));
        prop_assert_eq!(ord_p(&p, &(&n * &m)).unwrap(), ord_p(&p, &n).unwrap() + ord_p(&p, &m).unwrap());
    }

    #[test]
    fn ord_of_prime_power_times_unit(k in 0u32..20, z in 1i64..10_000, p in small_prime()) {
        prop_assume!(z % p != 0);
        let n = num_traits::pow(BigInt::from(p), k as usize) * z;
        prop_assert_eq!(ord_p(&BigInt::from(p), &n).unwrap(), k as u64);
    }

    #[test]
    fn pow_cmp_matches_integer_oracle(
        x in 1i64..40, a in -12i64..12, b in 1i64..8, yn in 1i64..200, yd in 1i64..50,
    ) {
        let (x, q, y) = (rat(x, 1), rat(a, b), rat(yn, yd));
        prop_assert_eq!(pow_cmp(&x, &q, &y).unwrap(), oracle_cmp(&x, &q, &y));
    }

    #[test]
    fn pow_bounds_are_tight(x in 2i64..40, a in -9i64..10, b in 1i64..7, n in 0u32..24) {
        let (x, q) = (rat(x, 1), rat(a, b));
        let hi = pow_upper(&x, &q, n).unwrap();
        let lo = pow_lower(&x, &q, n).unwrap();
        prop_assert!(oracle_cmp(&x, &q, &hi) != Ordering::Greater);
        prop_assert!(oracle_cmp(&x, &q, &lo) != Ordering::Less || lo.is_zero());
        let step = two_pow(-(n as i64));
        if oracle_cmp(&x, &q, &hi) != Ordering::Equal {
            let below = &hi - &step;
            prop_assert!(!below.is_positive() || oracle_cmp(&x, &q, &below) == Ordering::Greater);
            prop_assert!(&hi - &lo <= step);
        }
    }

    #[test]
    fn log_upper_is_the_least_grid_point(m in 2i64..12, yn in 1i64..500, yd in 1i64..500, n in 0u32..6) {
        let y = rat(yn, yd);
        let b = finite(log_upper(&BigInt::from(m), &y, n).unwrap());
        let m = rat(m, 1);
        // m^b >= y and m^(b - 2^-n) < y
        prop_assert!(oracle_cmp(&m, &b, &y) != Ordering::Less);
        let below = &b - two_pow(-(n as i64));
        prop_assert_eq!(oracle_cmp(&m, &below, &y), Ordering::Less);
    }

    #[test]
    fn exp_and_log_streams_are_antitone(x in 2i64..12, a in -6i64..4, b in 1i64..5) {
        let lambda = UpperReal::constant(ExtRational::Finite(rat(a, b)));
        let e = upper_exp(&DedekindReal::from_int(x), &lambda).unwrap();
        let l = upper_log(&BigInt::from(x), &e).unwrap();
        for u in [&e, &l] {
            let bounds: Vec<ExtRational> = (0..=40).map(|s| u.bound(s)).collect();
            prop_assert!(bounds.windows(2).all(|w| w[0] >= w[1]));
        }
        let back = finite(l.bound(30));
        prop_assert!((back - rat(a, b)).abs() <= two_pow(-10));
    }

    #[test]
    fn exp_is_monotone_in_the_exponent(x in 2i64..12, a in -6i64..6, c in -6i64..6, b in 1i64..5) {
        let (l, m) = if a <= c { (a, c) } else { (c, a) };
        let base = DedekindReal::from_int(x);
        let e = |k: i64| upper_exp(&base, &UpperReal::constant(ExtRational::Finite(rat(k, b)))).unwrap();
        let (el, em) = (e(l), e(m));
        for n in 0..=30u32 {
            let slack = ExtRational::Finite(two_pow(-(n as i64)));
            prop_assert!(el.bound(n) <= em.bound(n).upper_add(&slack));
        }
    }

    #[test]
    fn dedekind_outputs_are_narrow(x in 2i64..30, a in -5i64..5, b in 1i64..6) {
        let p = ded_pow_rat(&rat(x, 1), &DedekindReal::from_rational(rat(a, b))).unwrap();
        let l = ded_log(&BigInt::from(x + 1), &p).unwrap();
        for n in [0u32, 5, 12, 20, 30] {
            prop_assert!(p.width(n) <= two_pow(-(n as i64)));
            prop_assert!(l.width(n) <= two_pow(-(n as i64)));
            let (lo, hi) = p.interval(n);
            let q = rat(a, b);
            prop_assert!(oracle_cmp(&rat(x, 1), &q, &lo) != Ordering::Less);
            prop_assert!(oracle_cmp(&rat(x, 1), &q, &hi) != Ordering::Greater);
        }
    }

    #[test]
    fn standard_values_are_even_and_multiplicative(
        m in -1000i64..1000, n in -1000i64..1000, p in small_prime(), k in 1i64..4,
    ) {
        let kinds = [
            ClosedForm::Trivial,
            ClosedForm::Euclid,
            ClosedForm::padic(p),
            ClosedForm::pchar(p),
            ClosedForm::power(ClosedForm::padic(p), ExtRational::from_int(-k)),
        ];
        let (m, n) = (BigInt::from(m), BigInt::from(n));
        for kind in kinds {
            let av = make_standard(&kind).unwrap();
            prop_assert_eq!(av.eval(&m, 20), av.eval(&-&m, 20));
            let prod = av.eval(&m, 20).upper_mul_nonneg(&av.eval(&n, 20)).unwrap();
            prop_assert_eq!(av.eval(&(&m * &n), 20), prod, "{}", kind);
        }
    }

    #[test]
    fn fractional_powers_are_multiplicative_on_enclosures(
        m in 1i64..1000, n in 1i64..1000, p in small_prime(), a in 1i64..8, b in 2i64..5,
    ) {
        prop_assume!(a % b != 0);
        let padic = ClosedForm::power(ClosedForm::padic(p), ExtRational::from_ratio(-a, b));
        let euclid = ClosedForm::power(ClosedForm::Euclid, ExtRational::from_ratio(1, b));
        for kind in [padic, euclid] {
            let av = make_standard(&kind).unwrap();
            let d = |k: i64| dedekindize(&av, &BigInt::from(k)).unwrap().interval(20);
            let ((ml, mh), (nl, nh), (pl, ph)) = (d(m), d(n), d(m * n));
            prop_assert!(pl <= &mh * &nh && &ml * &nl <= ph, "{}", kind);
        }
    }

    #[test]
    fn principal_reconstruction_is_the_padic_power(p in small_prime(), a in 1i64..12, b in 1i64..5, n in 1i64..=1000) {
        let lambda = ExtRational::from_ratio(-a, b);
        let ideal = PrimeIdealZ::principal(BigInt::from(p)).unwrap();
        let rebuilt = reconstruct(&ideal, &UpperReal::constant(lambda.clone()), 20).unwrap();
        let standard = make_standard(&ClosedForm::power(ClosedForm::padic(p), lambda)).unwrap();
        let n = BigInt::from(n);
        let got = finite(rebuilt.eval(&n, 20));
        prop_assert_eq!(ExtRational::Finite(got.clone()), standard.eval(&n, 20));
        let k = ord_p(&BigInt::from(p), &n).unwrap() as i64;
        let base = ipow(&rat(p, 1), k);
        let q = rat(-a, b);
        prop_assert!(oracle_cmp(&base, &q, &got) != Ordering::Greater);
        if oracle_cmp(&base, &q, &got) != Ordering::Equal {
            prop_assert_eq!(oracle_cmp(&base, &q, &(&got - two_pow(-20))), Ordering::Greater);
        }
    }

    #[test]
    fn zero_ideal_reconstruction_is_a_root(a in 0i64..=6, n in 1i64..=1000) {
        let q = rat(a, 6);
        let lambda = ExtRational::Finite(q.clone());
        let rebuilt = reconstruct(&PrimeIdealZ::ZeroCandidate, &UpperReal::constant(lambda.clone()), 20).unwrap();
        let standard = make_standard(&ClosedForm::power(ClosedForm::Euclid, lambda)).unwrap();
        let n = BigInt::from(n);
        let got = finite(rebuilt.eval(&n, 20));
        prop_assert_eq!(ExtRational::Finite(got.clone()), standard.eval(&n, 20));
        let x = BigRational::from_integer(n);
        prop_assert!(oracle_cmp(&x, &q, &got) != Ordering::Greater);
        if oracle_cmp(&x, &q, &got) != Ordering::Equal {
            prop_assert_eq!(oracle_cmp(&x, &q, &(&got - two_pow(-20))), Ordering::Greater);
        }
    }

    #[test]
    fn principal_ideal_is_unique(p in small_prime(), a in 1i64..8, b in 1i64..4) {
        let kind = ClosedForm::power(ClosedForm::padic(p), ExtRational::from_ratio(-a, b));
        let av = make_standard(&kind).unwrap();
        let (ideal, ev) = detect_ideal(&av, 60, 20).unwrap();
        prop_assert_eq!(ideal.generator(), Some(&BigInt::from(p)));
        prop_assert!(ev.witnesses.iter().all(|w| w.n.is_multiple_of(&BigInt::from(p))));
        for q in ostrowski_core::exact_arith::primes_upto(60) {
            if q != BigInt::from(p) {
                prop_assert!(av.eval(&q, 20) >= ExtRational::one());
            }
        }
    }
}

#[test]
fn non_archimedean_values_are_ultrametric() {
    let kinds = [
        ClosedForm::padic(3),
        ClosedForm::pchar(2),
        ClosedForm::power(ClosedForm::padic(5), ExtRational::from_ratio(-1, 2)),
        ClosedForm::Euclid,
    ];
    for kind in kinds {
        let av = make_standard(&kind).unwrap();
        if let NaDetection::NonArchWitness { .. } = detect_na(&av, 100, 20) {
            let r = check_ultrametric(&av, Window::symmetric(200), 20);
            assert_eq!(r.verdict, Verdict::Pass, "{kind}");
        } else {
            assert!(matches!(kind, ClosedForm::Euclid));
        }
    }
}

#[test]
fn pchar_is_the_limit_of_padic_powers() {
    for p in [2i64, 3, 5] {
        let pchar = make_standard(&ClosedForm::pchar(p)).unwrap();
        for n in [p, 2 * p, p * p * 3] {
            let n = BigInt::from(n);
            let values: Vec<ExtRational> = (0..=6)
                .map(|k| {
                    let lambda = ExtRational::from_int(-(1i64 << k));
                    make_standard(&ClosedForm::power(ClosedForm::padic(p), lambda)).unwrap().eval(&n, 20)
                })
                .collect();
            assert!(values.windows(2).all(|w| w[0] > w[1]));
            assert!(values[6] < ExtRational::Finite(two_pow(-20)));
            assert_eq!(pchar.eval(&n, 20), ExtRational::zero());
        }
    }
}

#[test]
fn classification_recovers_the_gluing_coordinates() {
    let tol = two_pow(-19);
    for p in [2i64, 3, 5, 7] {
        for (a, b) in [(-1, 4), (-1, 1), (-7, 2)] {
            let kind = ClosedForm::power(ClosedForm::padic(p), ExtRational::from_ratio(a, b));
            let pt = classify(&make_standard(&kind).unwrap(), 100, 20).unwrap();
            assert_eq!(pt.ideal.generator(), Some(&BigInt::from(p)), "{kind}");
            assert!((finite(pt.lambda.bound(20)) - rat(a, b)).abs() <= tol, "{kind}");
        }
    }
    for (a, b) in [(0, 1), (1, 3), (1, 1)] {
        let kind = ClosedForm::power(ClosedForm::Euclid, ExtRational::from_ratio(a, b));
        let pt = classify(&make_standard(&kind).unwrap(), 100, 20).unwrap();
        assert!(pt.ideal.is_zero_candidate(), "{kind}");
        assert!((finite(pt.lambda.bound(20)) - rat(a, b)).abs() <= tol, "{kind}");
    }
}

#[test]
fn reconstructions_satisfy_the_axioms() {
    use ostrowski_core::absval::{check_axioms, check_subtractive};
    let cases = [
        (Some(2i64), ExtRational::from_ratio(-1, 3)),
        (Some(7), ExtRational::from_int(-2)),
        (Some(3), ExtRational::NegInf),
        (None, ExtRational::from_ratio(1, 2)),
        (None, ExtRational::one()),
    ];
    for (p, lambda) in cases {
        let ideal = match p {
            Some(p) => PrimeIdealZ::principal(BigInt::from(p)).unwrap(),
            None => PrimeIdealZ::ZeroCandidate,
        };
        let av = reconstruct(&ideal, &UpperReal::constant(lambda.clone()), 20).unwrap();
        let label = format!("({ideal}, {lambda})");
        assert!(check_axioms(&av, Window::symmetric(100), 20, 300, 7).verdict.is_pass(), "{label}");
        assert!(check_subtractive(&av, Window::new(0, 60), 20).unwrap().verdict.is_pass(), "{label}");
        if p.is_some() {
            assert!(check_ultrametric(&av, Window::symmetric(100), 20).verdict.is_pass(), "{label}");
        }
    }
}
