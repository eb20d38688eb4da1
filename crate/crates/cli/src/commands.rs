use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Signed;
use ostrowski_core::absval::{make_standard, AbsValue, CheckReport, ClosedForm, Verdict, Window};
use ostrowski_core::exact_arith::{factorize, is_prime, ord_p, ExtRational};
use ostrowski_core::onesided::{approx_f64, DedekindReal, UpperReal};
use ostrowski_core::ostrowski::{classify, classify_q, reconstruct, roundtrip_z, ClassificationPoint, QPlace};
use ostrowski_core::spectra::{extract_prime, Extraction, PrimeIdealZ};
use ostrowski_core::suites::{run_suite, SuiteConfig, SuiteName, SuiteReport};
use ostrowski_core::Error;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Format, InnerArg, KindArg, KindArgs, SuiteArg};

const SCHEMA: &str = "1";
const DEFAULT_MAX_STAGE: u32 = 60;
const MAX_BUDGET: u64 = 1_000_000;
/// Trial division stays below a million steps.
const MAX_FACTOR: u64 = 1_000_000_000_000;

pub struct Output {
    pub ok: bool,
    pub text: String,
}

pub enum Failure {
    Usage(String),
    Error { text: String },
}

struct Ctx {
    command: &'static str,
    format: Format,
    stage: u32,
    budget: u64,
    seed: u64,
}

impl Ctx {
    fn emit(&self, ok: bool, body: Value, text: String) -> Output {
        let text = match self.format {
            Format::Json => document(self.command, body),
            Format::Text => text,
        };
        Output { ok, text }
    }

    fn fail(&self, err: Error) -> Failure {
        let text = match self.format {
            Format::Json => document(
                self.command,
                json!({"error": {"kind": err.kind_name(), "message": err.to_string()}}),
            ),
            Format::Text => format!("error: {err}"),
        };
        Failure::Error { text }
    }
}

fn document(command: &str, body: Value) -> String {
    let mut doc = json!({"schema": SCHEMA, "command": command});
    if let (Some(doc), Value::Object(body)) = (doc.as_object_mut(), body) {
        doc.extend(body);
    }
    serde_json::to_string_pretty(&doc).unwrap_or_default()
}

fn max_stage() -> u32 {
    std::env::var("OSTROWSKI_MAX_STAGE")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STAGE)
}

fn parse_int(flag: &str, s: &str) -> Result<BigInt, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("--{flag} expects an integer, got {s:?}")))
}

fn parse_prime(s: &str) -> Result<BigInt, Failure> {
    let p = parse_int("p", s)?;
    if !is_prime(&p) {
        return Err(Failure::Usage(format!("--p {p} is not prime")));
    }
    Ok(p)
}

fn parse_lambda(s: &str) -> Result<ExtRational, Failure> {
    s.parse()
        .map_err(|_| Failure::Usage(format!("--lambda expects a/b or -inf, got {s:?}")))
}

fn closed_form(args: &KindArgs) -> Result<ClosedForm, Failure> {
    let need_p = || {
        args.p
            .as_deref()
            .ok_or_else(|| Failure::Usage("this kind needs --p".into()))
            .and_then(parse_prime)
    };
    let kind = match args.kind {
        KindArg::Trivial => ClosedForm::Trivial,
        KindArg::Euclid => ClosedForm::Euclid,
        KindArg::Padic => ClosedForm::Padic(need_p()?),
        KindArg::Pchar => ClosedForm::PChar(need_p()?),
        KindArg::Power => {
            let lambda = args
                .lambda
                .as_deref()
                .ok_or_else(|| Failure::Usage("--kind power needs --lambda".into()))
                .and_then(parse_lambda)?;
            let inner = match args.inner {
                Some(InnerArg::Euclid) => ClosedForm::Euclid,
                Some(InnerArg::Padic) => ClosedForm::Padic(need_p()?),
                None => return Err(Failure::Usage("--kind power needs --inner euclid|padic".into())),
            };
            ClosedForm::power(inner, lambda)
        }
    };
    kind.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(kind)
}

fn standard(args: &KindArgs) -> Result<(ClosedForm, AbsValue), Failure> {
    let kind = closed_form(args)?;
    let av = make_standard(&kind).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((kind, av))
}

fn kind_json(kind: &ClosedForm) -> Value {
    serde_json::to_value(kind).unwrap_or(Value::Null)
}

fn dedekind_json(x: &DedekindReal, stage: u32) -> Value {
    let (lo, hi) = x.interval(stage);
    json!({"lo": lo.to_string(), "hi": hi.to_string(), "stage": stage})
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let run = &cli.run;
    let limit = max_stage();
    if run.stage > limit {
        return Err(Failure::Usage(format!(
            "--stage {} exceeds the guard {limit} (set OSTROWSKI_MAX_STAGE to raise it)",
            run.stage
        )));
    }
    if run.budget > MAX_BUDGET {
        return Err(Failure::Usage(format!("--budget {} exceeds {MAX_BUDGET}", run.budget)));
    }
    let command = match &cli.command {
        Command::Eval { .. } => "eval",
        Command::Classify { .. } => "classify",
        Command::Reconstruct { .. } => "reconstruct",
        Command::Roundtrip { .. } => "roundtrip",
        Command::ClassifyQ { .. } => "classify-q",
        Command::Factor { .. } => "factor",
        Command::Ord { .. } => "ord",
        Command::ExtractPrime { .. } => "extract-prime",
        Command::Suite { .. } => "suite",
    };
    let ctx = Ctx {
        command,
        format: run.format,
        stage: run.stage,
        budget: run.budget,
        seed: run.seed,
    };
    match &cli.command {
        Command::Eval { kind, n } => eval(&ctx, kind, n),
        Command::Classify { kind } => classify_cmd(&ctx, kind),
        Command::Reconstruct { ideal, lambda, n } => reconstruct_cmd(&ctx, ideal, lambda, n),
        Command::Roundtrip { kind, window } => roundtrip_cmd(&ctx, kind, *window),
        Command::ClassifyQ { kind } => classify_q_cmd(&ctx, kind),
        Command::Factor { n } => factor_cmd(&ctx, n),
        Command::Ord { p, n } => ord_cmd(&ctx, p, n),
        Command::ExtractPrime { elements } => extract_cmd(&ctx, elements),
        Command::Suite { name } => suite_cmd(&ctx, *name),
    }
}

fn eval(ctx: &Ctx, args: &KindArgs, n: &str) -> Result<Output, Failure> {
    let n = parse_int("n", n)?;
    let (kind, av) = standard(args)?;
    let value = av.eval(&n, ctx.stage);
    let body = json!({
        "kind": kind_json(&kind),
        "n": n.to_string(),
        "stage": ctx.stage,
        "value_upper": value.to_string(),
    });
    let text = format!("|{n}| <= {value} (~{:.6}) at stage {} for {kind}", approx_f64(&value), ctx.stage);
    Ok(ctx.emit(true, body, text))
}

fn point_text(pt: &ClassificationPoint, stage: u32) -> String {
    let ideal = match &pt.ideal {
        PrimeIdealZ::ZeroCandidate => "0 (candidate: no |n| < 1 found)".to_string(),
        PrimeIdealZ::Principal { p, .. } => format!("({p})"),
    };
    let lambda = pt.lambda.bound(stage);
    let mut text = format!("ideal   {ideal}\nlambda  <= {lambda} (~{:.6}) at stage {stage}", approx_f64(&lambda));
    if let Some(c) = &pt.certificate {
        let _ = write!(text, "\nlambda < 0 certified at stage {} via |{}| < 1", c.stage, c.na_witness);
    }
    text
}

fn classify_cmd(ctx: &Ctx, args: &KindArgs) -> Result<Output, Failure> {
    let (kind, av) = standard(args)?;
    let pt = classify(&av, ctx.budget, ctx.stage).map_err(|e| ctx.fail(e))?;
    let mut body = serde_json::to_value(&pt).unwrap_or(Value::Null);
    if let Some(obj) = body.as_object_mut() {
        obj.insert("kind".into(), kind_json(&kind));
        obj.insert("evidence".into(), serde_json::to_value(&pt.evidence).unwrap_or(Value::Null));
    }
    Ok(ctx.emit(true, body, point_text(&pt, ctx.stage)))
}

fn reconstruct_cmd(ctx: &Ctx, ideal: &str, lambda: &str, ns: &[String]) -> Result<Output, Failure> {
    let ideal: PrimeIdealZ = ideal
        .parse()
        .map_err(|_| Failure::Usage(format!("--ideal expects 0 or a prime, got {ideal:?}")))?;
    let lambda = parse_lambda(lambda)?;
    let ns: Vec<BigInt> = if ns.is_empty() {
        (0..=10).map(BigInt::from).collect()
    } else {
        ns.iter().map(|n| parse_int("n", n)).collect::<Result<_, _>>()?
    };
    let av = reconstruct(&ideal, &UpperReal::constant(lambda.clone()), ctx.stage).map_err(|e| ctx.fail(e))?;
    let values: Vec<(BigInt, ExtRational)> = ns.into_iter().map(|n| {
        let v = av.eval(&n, ctx.stage);
        (n, v)
    }).collect();
    let body = json!({
        "ideal": ideal.to_string(),
        "lambda": lambda.to_string(),
        "closed_form": av.descriptor().map(kind_json),
        "stage": ctx.stage,
        "values": values.iter().map(|(n, v)| json!({"n": n.to_string(), "value_upper": v.to_string()})).collect::<Vec<_>>(),
    });
    let mut text = format!("reconstruction of ({ideal}, {lambda}) at stage {}", ctx.stage);
    for (n, v) in &values {
        let _ = write!(text, "\n  |{n}| <= {v}");
    }
    Ok(ctx.emit(true, body, text))
}

fn report_text(r: &CheckReport) -> String {
    let verdict = match &r.verdict {
        Verdict::Pass => "PASS".to_string(),
        Verdict::FailWitness { m, n } => format!("FAIL at (m, n) = ({m}, {n})"),
        Verdict::Fail { reason } => format!("FAIL: {reason}"),
        Verdict::Inconclusive { reason } => format!("INCONCLUSIVE: {reason}"),
    };
    let mut text = format!(
        "{} on [{}, {}] at stage {}: {verdict} ({} checked)",
        r.property, r.window.lo, r.window.hi, r.stage, r.checked
    );
    if let Some(d) = &r.detail {
        let _ = write!(text, "\n  {d}");
    }
    text
}

fn roundtrip_cmd(ctx: &Ctx, args: &KindArgs, window: u32) -> Result<Output, Failure> {
    let kind = closed_form(args)?;
    let report = roundtrip_z(&kind, ctx.budget, ctx.stage, Window::symmetric(window as i64)).map_err(|e| ctx.fail(e))?;
    let mut body = serde_json::to_value(&report).unwrap_or(Value::Null);
    if let Some(obj) = body.as_object_mut() {
        obj.insert("kind".into(), kind_json(&kind));
    }
    let text = format!("{kind}: {}", report_text(&report));
    Ok(ctx.emit(report.verdict.is_pass(), body, text))
}

fn classify_q_cmd(ctx: &Ctx, args: &KindArgs) -> Result<Output, Failure> {
    let (kind, av) = standard(args)?;
    let place = classify_q(&av, ctx.budget, ctx.stage).map_err(|e| ctx.fail(e))?;
    let alpha = dedekind_json(place.alpha(), ctx.stage);
    let (lo, hi) = place.alpha().interval(ctx.stage);
    let body = match &place {
        QPlace::EuclidPow { .. } => json!({"kind": kind_json(&kind), "place": "euclid", "alpha": alpha}),
        QPlace::PadicPow { p, .. } => {
            json!({"kind": kind_json(&kind), "place": "padic", "p": p.to_string(), "alpha": alpha})
        }
    };
    let text = format!("{kind} is {place} with alpha in [{lo}, {hi}] at stage {}", ctx.stage);
    Ok(ctx.emit(true, body, text))
}

fn factor_cmd(ctx: &Ctx, n: &str) -> Result<Output, Failure> {
    let n = parse_int("n", n)?;
    if n.abs() > BigInt::from(MAX_FACTOR) {
        return Err(Failure::Usage(format!("--n must satisfy |n| <= {MAX_FACTOR}")));
    }
    let f = factorize(&n).map_err(|e| ctx.fail(e))?;
    let body = json!({
        "n": n.to_string(),
        "factors": f.0.iter().map(|(p, e)| json!({"p": p.to_string(), "e": e})).collect::<Vec<_>>(),
    });
    let parts: Vec<String> = f
        .0
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    let sign = if n.is_negative() { "-" } else { "" };
    let text = format!("{n} = {sign}{}", if parts.is_empty() { "1".into() } else { parts.join(" * ") });
    Ok(ctx.emit(true, body, text))
}

fn ord_cmd(ctx: &Ctx, p: &str, n: &str) -> Result<Output, Failure> {
    let p = parse_prime(p)?;
    let n = parse_int("n", n)?;
    let k = ord_p(&p, &n).map_err(|e| ctx.fail(e))?;
    let body = json!({"p": p.to_string(), "n": n.to_string(), "ord": k});
    Ok(ctx.emit(true, body, format!("ord_{p}({n}) = {k}")))
}

fn extract_cmd(ctx: &Ctx, elements: &[String]) -> Result<Output, Failure> {
    let elems: Vec<BigInt> = elements.iter().map(|e| parse_int("element", e)).collect::<Result<_, _>>()?;
    let ex = extract_prime(&elems).map_err(|e| ctx.fail(e))?;
    let ok = !matches!(ex, Extraction::Contradiction);
    let text = match &ex {
        Extraction::Principal { p } => format!("principal ideal ({p})"),
        Extraction::Ambiguous { candidates } => format!(
            "ambiguous: candidates {}",
            candidates.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
        Extraction::Contradiction => "contradiction: gcd is 1, no proper prime ideal contains all".into(),
    };
    let body = json!({
        "elements": elems.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "extraction": serde_json::to_value(&ex).unwrap_or(Value::Null),
    });
    Ok(ctx.emit(ok, body, text))
}

fn suite_name(s: SuiteArg) -> SuiteName {
    match s {
        SuiteArg::Axioms => SuiteName::Axioms,
        SuiteArg::Ultrametric => SuiteName::Ultrametric,
        SuiteArg::Subtractive => SuiteName::Subtractive,
        SuiteArg::Roundtrip => SuiteName::Roundtrip,
        SuiteArg::Fundamental => SuiteName::Fundamental,
        SuiteArg::Exponents => SuiteName::Exponents,
    }
}

fn suite_text(rep: &SuiteReport) -> String {
    let passed = rep.results.iter().filter(|r| r.pass).count();
    let mut text = format!(
        "suite {} at stage {}: {} ({passed}/{} properties)",
        rep.suite,
        rep.stage,
        if rep.pass { "PASS" } else { "FAIL" },
        rep.results.len()
    );
    let subjects: BTreeSet<&str> = rep.results.iter().filter(|r| !r.pass).map(|r| r.subject.as_str()).collect();
    for r in rep.results.iter().filter(|r| !r.pass) {
        let why = r
            .report
            .as_ref()
            .map(report_text)
            .or_else(|| r.detail.clone())
            .unwrap_or_default();
        let _ = write!(text, "\n  FAIL {} [{}]: {why}", r.property, r.subject);
    }
    if !subjects.is_empty() {
        let _ = write!(text, "\n  failing subjects: {}", subjects.len());
    }
    text
}

fn suite_cmd(ctx: &Ctx, name: SuiteArg) -> Result<Output, Failure> {
    let cfg = SuiteConfig {
        stage: ctx.stage,
        budget: ctx.budget,
        seed: ctx.seed,
    };
    let rep = run_suite(suite_name(name), &cfg);
    let body = serde_json::to_value(&rep).unwrap_or(Value::Null);
    Ok(ctx.emit(rep.pass, body, suite_text(&rep)))
}
