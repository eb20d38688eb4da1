//! Budget-bounded checks of the absolute-value axioms and subclasses.
//!
//! A check can only ever certify a violation; passing means "no violation
//! found on this window at this stage". With a closed form present,
//! relations are decided exactly on certified enclosures of the values.
//! Otherwise stage bounds are compared with tolerance `2^(1-stage)`, and a
//! violation must persist at `stage + 16` before it is reported.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::value::{dedekindize, AbsValue};
use crate::error::{Error, Result};
use crate::exact_arith::{two_pow, ExtRational};

/// Extra stages used to confirm a candidate violation.
const CONFIRM_STAGES: u32 = 16;

/// Inclusive integer window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Window { lo, hi }
    }

    pub fn symmetric(r: i64) -> Self {
        Window { lo: -r, hi: r }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    FailWitness {
        #[serde(with = "crate::wire")]
        m: BigInt,
        #[serde(with = "crate::wire")]
        n: BigInt,
    },
    /// Failure without an integer pair as witness.
    Fail {
        reason: String,
    },
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn fail(m: impl Into<BigInt>, n: impl Into<BigInt>) -> Self {
        Verdict::FailWitness {
            m: m.into(),
            n: n.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: String,
    pub window: Window,
    pub stage: u32,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Number of instances examined.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl CheckReport {
    pub(crate) fn new(property: &str, window: Window, stage: u32) -> Self {
        CheckReport {
            property: property.to_string(),
            window,
            stage,
            verdict: Verdict::Pass,
            checked: 0,
            detail: None,
        }
    }
}

/// Enclosure of `|n|`. Generic oracles give the point `[u, u]` of their stage
/// bound; closed forms give a certified interval.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Iv {
    lo: ExtRational,
    hi: ExtRational,
}

impl Iv {
    fn point(x: ExtRational) -> Self {
        Iv { lo: x.clone(), hi: x }
    }

    fn add(&self, o: &Iv) -> Iv {
        Iv {
            lo: self.lo.upper_add(&o.lo),
            hi: self.hi.upper_add(&o.hi),
        }
    }

    fn mul(&self, o: &Iv) -> Iv {
        let m = |a: &ExtRational, b: &ExtRational| a.upper_mul_nonneg(b).unwrap_or(ExtRational::PosInf);
        Iv {
            lo: m(&self.lo, &o.lo),
            hi: m(&self.hi, &o.hi),
        }
    }

    fn max(&self, o: &Iv) -> Iv {
        Iv {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }
}

/// Per-stage cache of `|n|` enclosures.
struct Table<'a> {
    av: &'a AbsValue,
    stage: u32,
    closed: bool,
    cache: HashMap<i128, Iv>,
}

impl<'a> Table<'a> {
    fn new(av: &'a AbsValue, stage: u32) -> Self {
        Table {
            av,
            stage,
            closed: av.descriptor().is_some(),
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, n: i128) -> Iv {
        let (av, stage, closed) = (self.av, self.stage, self.closed);
        self.cache
            .entry(n.abs())
            .or_insert_with(|| {
                let n = BigInt::from(n);
                let u = av.value(&n);
                if let Some(c) = u.as_const() {
                    return Iv::point(c.clone());
                }
                let ub = u.bound(stage);
                if !closed {
                    return Iv::point(ub);
                }
                match dedekindize(av, &n) {
                    Ok(d) => {
                        let (lo, hi) = d.interval(stage);
                        Iv {
                            lo: ExtRational::Finite(lo),
                            hi: ExtRational::Finite(hi).min(ub),
                        }
                    }
                    Err(_) => Iv {
                        lo: ExtRational::zero(),
                        hi: ub,
                    },
                }
            })
            .clone()
    }
}

#[derive(Clone, Copy)]
enum Relation {
    /// lhs <= rhs
    AtMost,
    /// lhs = rhs
    Equal,
}

/// Violation of a relation between stage bounds, up to `tol`.
fn violated(rel: Relation, lhs: &ExtRational, rhs: &ExtRational, tol: &BigRational) -> bool {
    let tol = ExtRational::Finite(tol.clone());
    match rel {
        Relation::AtMost => lhs > &rhs.upper_add(&tol),
        Relation::Equal => lhs > &rhs.upper_add(&tol) || rhs > &lhs.upper_add(&tol),
    }
}

/// Violation certified by enclosures.
fn certainly_violated(rel: Relation, lhs: &Iv, rhs: &Iv) -> bool {
    match rel {
        Relation::AtMost => lhs.lo > rhs.hi,
        Relation::Equal => lhs.lo > rhs.hi || rhs.lo > lhs.hi,
    }
}

enum Outcome {
    Holds,
    Violated,
}

/// Evaluates a relation on `|.|`. Closed forms are decided exactly from
/// enclosures at one stage; generic oracles compare stage bounds with
/// tolerance and need the violation to persist at a deeper stage.
struct Checker<'a> {
    closed: bool,
    stage: u32,
    base: Table<'a>,
    deep: Table<'a>,
}

type Sides<'s> = dyn Fn(&mut Table) -> (Iv, Iv) + 's;

impl<'a> Checker<'a> {
    fn new(av: &'a AbsValue, stage: u32) -> Self {
        Checker {
            closed: av.descriptor().is_some(),
            stage,
            base: Table::new(av, stage),
            deep: Table::new(av, stage + CONFIRM_STAGES),
        }
    }

    fn check(&mut self, rel: Relation, sides: &Sides) -> Outcome {
        let (l0, r0) = sides(&mut self.base);
        if self.closed {
            return if certainly_violated(rel, &l0, &r0) {
                Outcome::Violated
            } else {
                Outcome::Holds
            };
        }
        let tol0 = two_pow(1 - self.stage as i64);
        if !violated(rel, &l0.hi, &r0.hi, &tol0) {
            return Outcome::Holds;
        }
        let (l1, r1) = sides(&mut self.deep);
        let tol1 = two_pow(1 - (self.stage + CONFIRM_STAGES) as i64);
        if violated(rel, &l1.hi, &r1.hi, &tol1) {
            Outcome::Violated
        } else {
            Outcome::Holds
        }
    }

    fn verdict(&self, m: i128, n: i128, law: &str) -> Verdict {
        if self.closed {
            Verdict::fail(m, n)
        } else {
            Verdict::Inconclusive {
                reason: format!("{law} bounds disagree at ({m}, {n}) beyond tolerance"),
            }
        }
    }
}

/// Samples `trials` pairs from the window and tests multiplicativity and
/// the triangle inequality.
pub fn check_axioms(av: &AbsValue, window: Window, stage: u32, trials: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("axioms", window, stage);
    if window.is_empty() {
        report.verdict = Verdict::Inconclusive {
            reason: "empty window".into(),
        };
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checker = Checker::new(av, stage);
    let mut pending: Option<(Verdict, String)> = None;
    for _ in 0..trials {
        let m = rng.gen_range(window.lo..=window.hi) as i128;
        let n = rng.gen_range(window.lo..=window.hi) as i128;
        report.checked += 1;
        let laws: [(&str, Relation, &Sides); 2] = [
            ("multiplicativity", Relation::Equal, &|t| (t.get(m * n), t.get(m).mul(&t.get(n)))),
            ("triangle inequality", Relation::AtMost, &|t| triangle(t, m, n)),
        ];
        for (law, rel, sides) in laws {
            if let Outcome::Violated = checker.check(rel, sides) {
                let v = checker.verdict(m, n, law);
                if checker.closed {
                    report.verdict = v;
                    report.detail = Some(law.to_string());
                    return report;
                }
                pending.get_or_insert((v, law.to_string()));
            }
        }
    }
    if let Some((v, law)) = pending {
        report.verdict = v;
        report.detail = Some(law);
    }
    report
}

/// Pairs of the window in a fixed order, first by max(|m|, |n|), then with
/// integers ordered 0, 1, -1, 2, -2, ...
fn radial_pairs(window: Window) -> Vec<(i128, i128)> {
    let mut xs: Vec<i128> = (window.lo as i128..=window.hi as i128).collect();
    xs.sort_by_key(|&x| (x.abs(), x < 0));
    let mut pairs = Vec::with_capacity(xs.len() * xs.len());
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[..=i] {
            pairs.push((b, a));
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_by_key(|&(m, n)| m.abs().max(n.abs()));
    pairs
}

fn scan(
    checker: &mut Checker,
    pairs: impl IntoIterator<Item = (i128, i128)>,
    rel: Relation,
    law: &str,
    sides: impl Fn(&mut Table, i128, i128) -> (Iv, Iv),
) -> (u64, Option<Verdict>) {
    let mut checked = 0;
    for (m, n) in pairs {
        checked += 1;
        if let Outcome::Violated = checker.check(rel, &|t| sides(t, m, n)) {
            return (checked, Some(checker.verdict(m, n, law)));
        }
    }
    (checked, None)
}

fn triangle(t: &mut Table, m: i128, n: i128) -> (Iv, Iv) {
    (t.get(m + n), t.get(m).add(&t.get(n)))
}

fn subtractive(t: &mut Table, m: i128, n: i128) -> (Iv, Iv) {
    (t.get(m), t.get(m + n).add(&t.get(n)))
}

fn ultrametric(t: &mut Table, m: i128, n: i128) -> (Iv, Iv) {
    (t.get(m + n), t.get(m).max(&t.get(n)))
}

fn all_pairs(lo: i64, hi: i64) -> impl Iterator<Item = (i128, i128)> {
    (lo as i128..=hi as i128).flat_map(move |m| (lo as i128..=hi as i128).map(move |n| (m, n)))
}

/// Subtractive triangle inequality `|m| <= |m+n| + |n|` over all pairs of a
/// window of naturals, cross-checked against the equivalence
/// "triangle on Z iff triangle and subtractive triangle on N" on `[-hi, hi]`.
pub fn check_subtractive(av: &AbsValue, window: Window, stage: u32) -> Result<CheckReport> {
    if window.lo < 0 {
        return Err(Error::BadParameter("subtractive check needs a window of naturals".into()));
    }
    let mut report = CheckReport::new("subtractive triangle", window, stage);
    let mut checker = Checker::new(av, stage);
    let (checked, sub) = scan(&mut checker, all_pairs(window.lo, window.hi), Relation::AtMost, "subtractive triangle", subtractive);
    report.checked = checked;
    if let Some(v) = sub {
        report.verdict = v;
        return Ok(report);
    }
    let (_, n_sub) = scan(&mut checker, all_pairs(0, window.hi), Relation::AtMost, "subtractive triangle", subtractive);
    let (_, n_tri) = scan(&mut checker, all_pairs(0, window.hi), Relation::AtMost, "triangle inequality", triangle);
    let (_, z_tri) = scan(&mut checker, all_pairs(-window.hi, window.hi), Relation::AtMost, "triangle inequality", triangle);
    let on_n = n_sub.is_none() && n_tri.is_none();
    let on_z = z_tri.is_none();
    if on_n != on_z {
        report.verdict = Verdict::Inconclusive {
            reason: format!("equivalence mismatch: triangle on Z {on_z}, triangle+subtractive on N {on_n}"),
        };
    } else {
        report.detail = Some(format!("triangle on Z over [-{0}, {0}]: {on_z}", window.hi));
    }
    Ok(report)
}

/// Ultrametric inequality over all pairs of the window.
pub fn check_ultrametric(av: &AbsValue, window: Window, stage: u32) -> CheckReport {
    let mut report = CheckReport::new("ultrametric", window, stage);
    let mut checker = Checker::new(av, stage);
    let (checked, v) = scan(&mut checker, radial_pairs(window), Relation::AtMost, "ultrametric", ultrametric);
    report.checked = checked;
    if let Some(v) = v {
        report.verdict = v;
    }
    report
}

/// Outcome of the non-Archimedean detector. There is deliberately no
/// "Archimedean" outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum NaDetection {
    NonArchWitness {
        #[serde(with = "crate::wire")]
        n: BigInt,
    },
    Inconclusive,
}

/// Least `n` in `[2, budget]` whose stage bound is below 1.
pub fn detect_na(av: &AbsValue, budget: u64, stage: u32) -> NaDetection {
    let one = ExtRational::one();
    (2..=budget)
        .map(BigInt::from)
        .find(|n| av.eval(n, stage) < one)
        .map_or(NaDetection::Inconclusive, |n| NaDetection::NonArchWitness { n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absval::{make_standard, ClosedForm};
    use crate::onesided::UpperReal;

    fn std(c: ClosedForm) -> AbsValue {
        make_standard(&c).unwrap()
    }

    #[test]
    fn axioms_on_standard_values() {
        let r = check_axioms(&std(ClosedForm::padic(7)), Window::symmetric(50), 20, 200, 1);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.checked, 200);
        let r = check_axioms(&std(ClosedForm::Euclid), Window::symmetric(50), 20, 200, 1);
        assert_eq!(r.verdict, Verdict::Pass);
        let half = ClosedForm::power(ClosedForm::Euclid, ExtRational::from_ratio(1, 2));
        let r = check_axioms(&std(half), Window::symmetric(50), 20, 200, 3);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn corrupted_evaluator_is_caught() {
        let bad = AbsValue::from_oracle(|n| {
            if *n == BigInt::from(2) {
                UpperReal::constant(ExtRational::from_int(3))
            } else {
                UpperReal::constant(ExtRational::from(n.clone()))
            }
        })
        .with_descriptor(ClosedForm::Euclid);
        let r = check_axioms(&bad, Window::new(1, 1), 20, 5, 0);
        assert_eq!(r.verdict, Verdict::fail(1, 1));
        assert_eq!(r.detail.as_deref(), Some("triangle inequality"));
        // the same oracle without a closed form cannot be refuted by bounds
        let generic = AbsValue::from_oracle(|n| {
            if *n == BigInt::from(2) {
                UpperReal::constant(ExtRational::from_int(3))
            } else {
                UpperReal::constant(ExtRational::from(n.clone()))
            }
        });
        let r = check_axioms(&generic, Window::new(1, 1), 20, 5, 0);
        assert!(matches!(r.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn subtractive_examples() {
        for c in [ClosedForm::padic(2), ClosedForm::Euclid, ClosedForm::pchar(3)] {
            let r = check_subtractive(&std(c.clone()), Window::new(0, 100), 20).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{c}");
        }
        assert!(check_subtractive(&std(ClosedForm::Euclid), Window::new(-1, 3), 20).is_err());
    }

    #[test]
    fn ultrametric_examples() {
        let r = check_ultrametric(&std(ClosedForm::padic(3)), Window::symmetric(100), 20);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_ultrametric(&std(ClosedForm::Trivial), Window::symmetric(100), 20);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_ultrametric(&std(ClosedForm::Euclid), Window::symmetric(100), 20);
        assert_eq!(r.verdict, Verdict::fail(1, 1));
    }

    #[test]
    fn na_detection() {
        assert_eq!(
            detect_na(&std(ClosedForm::padic(11)), 20, 10),
            NaDetection::NonArchWitness { n: BigInt::from(11) }
        );
        assert_eq!(detect_na(&std(ClosedForm::Trivial), 1000, 30), NaDetection::Inconclusive);
        assert_eq!(detect_na(&std(ClosedForm::Euclid), 1000, 30), NaDetection::Inconclusive);
    }

    #[test]
    fn report_json() {
        let mut r = CheckReport::new("ultrametric", Window::symmetric(3), 20);
        r.verdict = Verdict::fail(1, 1);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "fail_witness");
        assert_eq!(v["m"], "1");
    }
}
