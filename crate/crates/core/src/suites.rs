//! Named property suites over the standard absolute values, as run by the
//! command-line tool.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::absval::{
    check_axioms, check_subtractive, check_ultrametric, make_standard, CheckReport, ClosedForm,
    Verdict, Window,
};
use crate::error::{Error, Result};
use crate::exact_arith::{two_pow, ExtRational};
use crate::onesided::{
    ded_pow_rat, ded_powq, upper_exp, upper_log, upper_mul, DedekindReal, UpperReal,
};
use crate::ostrowski::{compute_m, roundtrip_z};
use crate::spectra::check_subtractive_ideal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Axioms,
    Ultrametric,
    Subtractive,
    Roundtrip,
    Fundamental,
    Exponents,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::Axioms,
        SuiteName::Ultrametric,
        SuiteName::Subtractive,
        SuiteName::Roundtrip,
        SuiteName::Fundamental,
        SuiteName::Exponents,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Axioms => "axioms",
            SuiteName::Ultrametric => "ultrametric",
            SuiteName::Subtractive => "subtractive",
            SuiteName::Roundtrip => "roundtrip",
            SuiteName::Fundamental => "fundamental",
            SuiteName::Exponents => "exponents",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub stage: u32,
    pub budget: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            stage: 20,
            budget: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub subject: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
}

impl PropertyResult {
    fn from_report(subject: &str, report: CheckReport) -> Self {
        PropertyResult {
            property: report.property.clone(),
            subject: subject.to_string(),
            pass: report.verdict.is_pass(),
            detail: None,
            report: Some(report),
        }
    }

    fn plain(property: &str, subject: &str, pass: bool, detail: String) -> Self {
        PropertyResult {
            property: property.to_string(),
            subject: subject.to_string(),
            pass,
            detail: Some(detail),
            report: None,
        }
    }

    fn error(property: &str, subject: &str, err: Error) -> Self {
        PropertyResult::plain(property, subject, false, format!("error: {err}"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub stage: u32,
    pub pass: bool,
    pub results: Vec<PropertyResult>,
}

fn q(n: i64, d: i64) -> ExtRational {
    ExtRational::from_ratio(n, d)
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The closed forms the axiom, subtractive and fundamental suites run on.
pub fn standard_kinds() -> Vec<ClosedForm> {
    vec![
        ClosedForm::Trivial,
        ClosedForm::Euclid,
        ClosedForm::padic(2),
        ClosedForm::padic(3),
        ClosedForm::padic(5),
        ClosedForm::padic(7),
        ClosedForm::pchar(2),
        ClosedForm::pchar(3),
        ClosedForm::power(ClosedForm::padic(3), q(-1, 2)),
        ClosedForm::power(ClosedForm::padic(2), q(-7, 2)),
        ClosedForm::power(ClosedForm::Euclid, q(1, 2)),
        ClosedForm::power(ClosedForm::Euclid, q(1, 3)),
    ]
}

/// Closed forms exercised by the round-trip suite.
pub fn roundtrip_kinds() -> Vec<ClosedForm> {
    let mut kinds = Vec::new();
    for p in [2, 3, 5, 7, 97] {
        kinds.push(ClosedForm::padic(p));
        for lambda in [q(-1, 4), q(-7, 2)] {
            kinds.push(ClosedForm::power(ClosedForm::padic(p), lambda));
        }
    }
    for lambda in [q(0, 1), q(1, 3), q(1, 1)] {
        kinds.push(ClosedForm::power(ClosedForm::Euclid, lambda));
    }
    kinds.push(ClosedForm::Trivial);
    kinds
}

fn is_non_archimedean(kind: &ClosedForm) -> bool {
    match kind {
        ClosedForm::Euclid => false,
        ClosedForm::Power { inner, .. } => !matches!(**inner, ClosedForm::Euclid),
        _ => true,
    }
}

/// Runs `work` on every subject on its own thread; results keep subject order.
fn fan_out<T: Sync, F>(subjects: &[T], work: F) -> Vec<PropertyResult>
where
    F: Fn(&T) -> Vec<PropertyResult> + Sync,
{
    std::thread::scope(|scope| {
        let handles: Vec<_> = subjects.iter().map(|s| scope.spawn(|| work(s))).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap_or_else(|_| vec![PropertyResult::plain("panic", "", false, "worker panicked".into())]))
            .collect()
    })
}

const WINDOW: i64 = 100;
const TRIALS: u64 = 500;
const ROUNDTRIP_WINDOW: i64 = 50;

fn axioms(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    fan_out(&standard_kinds(), |kind| {
        let name = kind.to_string();
        let av = match make_standard(kind) {
            Ok(av) => av,
            Err(e) => return vec![PropertyResult::error("axioms", &name, e)],
        };
        let mut out = vec![PropertyResult::from_report(
            &name,
            check_axioms(&av, Window::symmetric(WINDOW), cfg.stage, TRIALS, cfg.seed),
        )];
        out.push(match check_subtractive(&av, Window::new(0, WINDOW), cfg.stage) {
            Ok(rep) => PropertyResult::from_report(&name, rep),
            Err(e) => PropertyResult::error("subtractive triangle", &name, e),
        });
        out
    })
}

fn ultrametric(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    let mut kinds: Vec<ClosedForm> = standard_kinds().into_iter().filter(is_non_archimedean).collect();
    kinds.push(ClosedForm::Euclid);
    fan_out(&kinds, |kind| {
        let name = kind.to_string();
        let av = match make_standard(kind) {
            Ok(av) => av,
            Err(e) => return vec![PropertyResult::error("ultrametric", &name, e)],
        };
        let rep = check_ultrametric(&av, Window::symmetric(WINDOW), cfg.stage);
        if is_non_archimedean(kind) {
            vec![PropertyResult::from_report(&name, rep)]
        } else {
            let refuted = matches!(rep.verdict, Verdict::FailWitness { .. });
            let mut res = PropertyResult::from_report(&name, rep);
            res.property = "not ultrametric".into();
            res.pass = refuted;
            vec![res]
        }
    })
}

fn subtractive(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    let mut out = fan_out(&standard_kinds(), |kind| {
        let name = kind.to_string();
        vec![match make_standard(kind).and_then(|av| check_subtractive(&av, Window::new(0, WINDOW), cfg.stage)) {
            Ok(rep) => PropertyResult::from_report(&name, rep),
            Err(e) => PropertyResult::error("subtractive triangle", &name, e),
        }]
    });
    for p in [2u64, 3, 5, 7] {
        let set = (1..=WINDOW as u64 / p).map(|k| k * p).collect();
        let name = format!("multiples of {p}");
        out.push(match check_subtractive_ideal(&set, WINDOW as u64) {
            Ok(rep) => PropertyResult::from_report(&name, rep),
            Err(e) => PropertyResult::error("subtractive ideal", &name, e),
        });
    }
    out
}

fn roundtrip(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    fan_out(&roundtrip_kinds(), |kind| {
        let name = kind.to_string();
        vec![match roundtrip_z(kind, cfg.budget, cfg.stage, Window::symmetric(ROUNDTRIP_WINDOW)) {
            Ok(rep) => PropertyResult::from_report(&name, rep),
            Err(e) => PropertyResult::error("roundtrip", &name, e),
        }]
    })
}

/// Expected value of `max{0, log_b |b|}` where it is known exactly.
fn expected_m(kind: &ClosedForm) -> ExtRational {
    match kind {
        ClosedForm::Euclid => ExtRational::one(),
        ClosedForm::Power { inner, lambda } if matches!(**inner, ClosedForm::Euclid) => {
            lambda.as_exact().cloned().unwrap_or(ExtRational::PosInf)
        }
        _ => ExtRational::zero(),
    }
}

fn fundamental(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    let tol = two_pow(-10);
    let ceiling = ExtRational::Finite(BigRational::one() + two_pow(-(cfg.stage as i64)));
    fan_out(&standard_kinds(), |kind| {
        let name = kind.to_string();
        let values = make_standard(kind).and_then(|av| {
            (2..=20)
                .map(|b| compute_m(&av, &BigInt::from(b), cfg.stage))
                .collect::<Result<Vec<_>>>()
        });
        let values = match values {
            Ok(v) => v,
            Err(e) => return vec![PropertyResult::error("base independence", &name, e)],
        };
        let finite: Vec<&BigRational> = values.iter().filter_map(ExtRational::finite).collect();
        let spread = match (finite.iter().min(), finite.iter().max()) {
            (Some(lo), Some(hi)) if finite.len() == values.len() => Some(*hi - *lo),
            _ => None,
        };
        let independent = spread.as_ref().is_some_and(|s| *s <= tol);
        let bounded = values.iter().all(|v| *v <= ceiling);
        let expected = expected_m(kind);
        let exact = expected.finite().is_some_and(|e| finite.iter().all(|v| (*v - e).abs() <= tol));
        vec![
            PropertyResult::plain(
                "base independence",
                &name,
                independent,
                format!("spread over b in [2, 20]: {}", spread.map_or("unbounded".into(), |s| s.to_string())),
            ),
            PropertyResult::plain("bounded by 1", &name, bounded, format!("M at b = 2: {}", values[0])),
            PropertyResult::plain("expected value", &name, exact, format!("expected {expected}")),
        ]
    })
}

fn within(a: &ExtRational, b: &ExtRational, tol: &BigRational) -> bool {
    match (a, b) {
        (ExtRational::Finite(x), ExtRational::Finite(y)) => (x - y).abs() <= *tol,
        _ => a == b,
    }
}

/// Bounds of both sides of one instance of an exponent law.
type LawInstance = Result<(ExtRational, ExtRational)>;

fn exponent_laws(x: i64, l: &BigRational, m: &BigRational, stage: u32) -> Vec<(&'static str, LawInstance)> {
    let base = DedekindReal::from_int(x);
    let exp = |lambda: &BigRational| upper_exp(&base, &UpperReal::constant(ExtRational::Finite(lambda.clone())));
    let bound = |u: Result<UpperReal>| u.map(|u| u.bound(stage));
    let add = (|| {
        let lhs = exp(&(l + m))?;
        let rhs = upper_mul(&exp(l)?, &exp(m)?)?;
        Ok((lhs.bound(stage), rhs.bound(stage)))
    })();
    let mul = (|| {
        let lhs = exp(&(l * m))?;
        let inner = ded_pow_rat(&BigRational::from_integer(x.into()), &DedekindReal::from_rational(l.clone()))?;
        let rhs = ded_powq(&inner, m)?;
        Ok((lhs.bound(stage), ExtRational::Finite(rhs.hi(stage))))
    })();
    let prod = (|| {
        let y = if x == 10 { 2 } else { x + 1 };
        let xy = DedekindReal::from_int(x * y);
        let lam = UpperReal::constant(ExtRational::Finite(l.clone()));
        let lhs = upper_exp(&xy, &lam)?;
        let rhs = upper_mul(&exp(l)?, &upper_exp(&DedekindReal::from_int(y), &lam)?)?;
        Ok((lhs.bound(stage), rhs.bound(stage)))
    })();
    let zero = bound(upper_exp(&base, &UpperReal::zero())).map(|v| (v, ExtRational::one()));
    let one = bound(exp(&BigRational::one())).map(|v| (v, ExtRational::from_int(x)));
    let unit = bound(upper_exp(&DedekindReal::from_int(1), &UpperReal::constant(ExtRational::Finite(l.clone()))))
        .map(|v| (v, ExtRational::one()));
    let inverse = (|| {
        let back = upper_log(&BigInt::from(x), &exp(l)?)?;
        Ok((back.bound(stage), ExtRational::Finite(l.clone())))
    })();
    vec![
        ("x^(l+m) = x^l x^m", add),
        ("x^0 = 1", zero),
        ("x^(lm) = (x^l)^m", mul),
        ("x^1 = x", one),
        ("(xy)^l = x^l y^l", prod),
        ("1^l = 1", unit),
        ("log_x x^l = l", inverse),
    ]
}

fn exponents(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    let tol = two_pow(-10);
    let lambdas = [r(-2, 1), r(-1, 2), r(0, 1), r(1, 3), r(1, 1)];
    let mut cases = Vec::new();
    for x in [2i64, 3, 10] {
        for l in &lambdas {
            for m in &lambdas {
                cases.push((x, l.clone(), m.clone()));
            }
        }
    }
    let stage = cfg.stage;
    let mut out = fan_out(&cases, |(x, l, m)| {
        let subject = format!("x = {x}, l = {l}, m = {m}");
        let mut res = Vec::new();
        for (law, inst) in exponent_laws(*x, l, m, stage) {
            res.push(match inst {
                Ok((a, b)) => PropertyResult::plain(law, &subject, within(&a, &b, &tol), format!("{a} vs {b}")),
                Err(e) => PropertyResult::error(law, &subject, e),
            });
        }
        if l <= m {
            let base = DedekindReal::from_int(*x);
            let at = |v: &BigRational| {
                upper_exp(&base, &UpperReal::constant(ExtRational::Finite(v.clone()))).map(|u| u.bound(stage))
            };
            res.push(match (at(l), at(m)) {
                (Ok(a), Ok(b)) => {
                    let ok = a <= b.upper_add(&ExtRational::Finite(tol.clone()));
                    PropertyResult::plain("monotone in the exponent", &subject, ok, format!("{a} <= {b}"))
                }
                (Err(e), _) | (_, Err(e)) => PropertyResult::error("monotone in the exponent", &subject, e),
            });
        }
        res
    });
    // duplicates of the single-exponent laws are dropped
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|p| {
        let single = matches!(p.property.as_str(), "x^0 = 1" | "x^1 = x");
        !single || seen.insert((p.property.clone(), p.subject.split(", l").next().unwrap_or("").to_string()))
    });
    out
}

pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> SuiteReport {
    let results = match name {
        SuiteName::Axioms => axioms(cfg),
        SuiteName::Ultrametric => ultrametric(cfg),
        SuiteName::Subtractive => subtractive(cfg),
        SuiteName::Roundtrip => roundtrip(cfg),
        SuiteName::Fundamental => fundamental(cfg),
        SuiteName::Exponents => exponents(cfg),
    };
    SuiteReport {
        suite: name.to_string(),
        stage: cfg.stage,
        pass: results.iter().all(|r| r.pass),
        results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in SuiteName::ALL {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert!("bogus".parse::<SuiteName>().is_err());
    }

    #[test]
    fn fundamental_suite_passes() {
        let rep = run_suite(SuiteName::Fundamental, &SuiteConfig { stage: 30, ..Default::default() });
        let bad: Vec<_> = rep.results.iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn exponent_suite_passes() {
        let rep = run_suite(SuiteName::Exponents, &SuiteConfig { stage: 30, ..Default::default() });
        let bad: Vec<_> = rep.results.iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn ultrametric_suite_passes() {
        let rep = run_suite(SuiteName::Ultrametric, &SuiteConfig::default());
        let bad: Vec<_> = rep.results.iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
