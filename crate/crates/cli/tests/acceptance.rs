//! The nine acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! Criteria 4, 6, 8 and 9 are checked exactly as stated and are expected to
//! fail; the detail text of each says why and reports the closest attainable
//! variant alongside.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exactapprox::commands::enumerate_parallel;
use exactapprox_core::cantor::{ten_pow_neg, DEFAULT_DEPTH_CAP, DEFAULT_NODE_BUDGET};
use exactapprox_core::cf::{periodic_value, perron_residual};
use exactapprox_core::construct::{EntryClass, Mode};
use exactapprox_core::spectrum::{constant, two_sided_bound};
use exactapprox_core::surd::parse_exact;
use exactapprox_core::verify::{convergent_fractions, convergent_predicate, Decision, Sign};
use exactapprox_core::{
    build_alpha, lagrange_value, markoff_numbers, recheck_certificate, represent_gamma, BigInt, BigRational,
    Certificate, CfExpansion, ConstructionParams, Decomposer, DigitSystem, Error, PadFunction, QuadraticSurd, Tail,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion(n: u8, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let result = match result {
        Ok(d) if took > budget => {
            Err(format!("{d}; but took {:.1} s against a budget of {} s", took.as_secs_f64(), budget.as_secs()))
        }
        r => r,
    };
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {n} {tag} {title} [{:.2} s]: {detail}", took.as_secs_f64());
    result.is_ok()
}

fn int(n: i64) -> QuadraticSurd {
    QuadraticSurd::from(n)
}

fn cf(a0: i64, pre: &[u64], period: &[u64]) -> QuadraticSurd {
    periodic_value(&BigInt::from(a0), pre, period)
}

fn surd(p: i64, d: u32, q: i64) -> QuadraticSurd {
    QuadraticSurd::new(p, d, q).unwrap()
}

fn identities() -> Outcome {
    let checks = [
        ("4+[0;4,(1,3)*]+[0;(1,3)*] = 5", &cf(4, &[4], &[1, 3]) + &cf(0, &[], &[1, 3]) == int(5)),
        ("5+[0;5,(1,4)*]+[0;(1,4)*] = 6", &cf(5, &[5], &[1, 4]) + &cf(0, &[], &[1, 4]) == int(6)),
        (
            "3+[0;1,4,(1,3)*]+[0;(1,3)*] = 2+4sqrt(21)/7",
            &cf(3, &[1, 4], &[1, 3]) + &cf(0, &[], &[1, 3]) == two_sided_bound(),
        ),
        ("2+4sqrt(21)/7 < 4+[0;(3,1)*]+[0;2,(1,3)*]", two_sided_bound() < &cf(4, &[], &[3, 1]) + &cf(0, &[2], &[1, 3])),
        ("[0;(4,1)*]+[0;(4,1)*] = sqrt(2)-1", &cf(0, &[], &[4, 1]) + &cf(0, &[], &[4, 1]) == surd(-1, 2, 1)),
        ("[0;(1,4)*]+[0;(1,4)*] = 4sqrt(2)-4", &cf(0, &[], &[1, 4]) + &cf(0, &[], &[1, 4]) == surd(-4, 32, 1)),
    ];
    for (name, ok) in &checks {
        ensure(*ok, || format!("{name} does not hold"))?;
    }
    Ok(format!("{} exact identities hold", checks.len()))
}

fn perron() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let one = BigRational::from_integer(1.into());
    let goal = ten_pow_neg(20);
    let mut widest = BigRational::from_integer(0.into());
    for s in 0..100 {
        let digits: Vec<u64> = (0..40).map(|_| rng.gen_range(1..=4)).collect();
        let alpha = CfExpansion::new(0, digits, Tail::Terminated).map_err(|e| e.to_string())?;
        for n in 0..=30 {
            let r = perron_residual(&alpha, n).map_err(|e| e.to_string())?;
            ensure(r.contains(&one), || format!("string {s}, n = {n}: enclosure {r} misses 1"))?;
            ensure(r.width() < goal, || format!("string {s}, n = {n}: width not below 1e-20"))?;
            widest = widest.max(r.width());
        }
    }
    Ok(format!("3100 enclosures contain 1, widest {widest} (digit strings are complete expansions)"))
}

fn decompositions(system: DigitSystem, count: usize, seed: u64) -> Result<usize, String> {
    let g = system.guaranteed_sum().ok_or("no guaranteed interval")?.clone();
    let margin = ten_pow_neg(6);
    let lo = g.lo.enclose(128).hi().clone() + &margin;
    let hi = g.hi.enclose(128).lo().clone() - &margin;
    let goal = ten_pow_neg(30);
    let scale = BigInt::from(10u64.pow(15));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut longest = 0;
    for i in 0..count {
        let k: u64 = rng.gen_range(0..=10u64.pow(15));
        let t = &lo + (&hi - &lo) * BigRational::new(BigInt::from(k), scale.clone());
        let target = QuadraticSurd::from_rational(t);
        let mut d = Decomposer::new(target.clone(), system.clone(), DEFAULT_DEPTH_CAP, DEFAULT_NODE_BUDGET)
            .map_err(|e| e.to_string())?;
        while d.sum_interval().width() >= goal {
            d.step().map_err(|e| format!("{} target {i}: {e}", system.name()))?;
            ensure(d.covers_target(), || format!("{} target {i}: covering lost", system.name()))?;
            ensure(system.validate(d.b(), None).is_ok() && system.validate(d.c(), None).is_ok(), || {
                format!("{} target {i}: forbidden digit or pair emitted", system.name())
            })?;
        }
        let len = d.b().len() + d.c().len();
        ensure(len <= 200, || format!("{} target {i}: {len} digits emitted", system.name()))?;
        longest = longest.max(len);
    }
    Ok(longest)
}

fn decomposition() -> Outcome {
    let f4 = decompositions(DigitSystem::bounded(4).unwrap(), 1000, 31)?;
    let f3 = decompositions(DigitSystem::bounded(3).unwrap(), 500, 32)?;
    let fj = decompositions(DigitSystem::freiman_judin(), 500, 33)?;
    Ok(format!("2000 targets below 1e-30, most digits emitted: F4 {f4}, F3 {f3}, FJ {fj}"))
}

fn construct(gamma: &str, pad: PadFunction, mode: Mode, blocks: usize) -> Result<(CfExpansion, Certificate), String> {
    let gamma = parse_exact(gamma).map_err(|e| e.to_string())?;
    let params = ConstructionParams::new(gamma.clone(), pad, mode).map_err(|e| e.to_string())?;
    let mut rep = represent_gamma(&gamma).map_err(|e| e.to_string())?;
    build_alpha(&params, &mut rep, blocks).map_err(|e| match e {
        Error::PadTooSlow { block, .. } => format!("stopped in block {block}: {e}"),
        e => e.to_string(),
    })
}

fn check_one_sided(gamma: &str, cf: &CfExpansion, cert: &Certificate) -> Result<(), String> {
    let marked: Vec<_> = cert.entries.iter().filter(|e| e.class == EntryClass::MarkedAbove).collect();
    ensure(marked.len() >= 3, || format!("{gamma}: only {} marked indices", marked.len()))?;
    for e in &marked {
        ensure(e.lambda.cmp_surd(&cert.gamma) == Some(Ordering::Greater), || {
            format!("{gamma}: lambda_{} not strictly above gamma", e.n)
        })?;
    }
    let line = cert.gamma.add_rational(&-&cert.epsilon);
    for e in cert.entries.iter().filter(|e| e.class != EntryClass::MarkedAbove) {
        ensure(e.lambda.cmp_surd(&line) == Some(Ordering::Less), || {
            format!("{gamma}: lambda_{} not below gamma - epsilon", e.n)
        })?;
    }
    let r = recheck_certificate(cert, cf).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{gamma}: recheck failed: {:?}", r.failure))
}

fn one_sided(literal: &Result<(CfExpansion, Certificate), String>) -> Outcome {
    let mut failures = Vec::new();
    let cases = ["21/4", "28/5", "7"];
    for (i, g) in cases.iter().enumerate() {
        let built = if i == 0 { literal.clone() } else { construct(g, PadFunction::Log, Mode::OneSided, 3) };
        match built.and_then(|(cf, cert)| check_one_sided(g, &cf, &cert)) {
            Ok(()) => {}
            Err(e) => failures.push(format!("gamma = {g}: {e}")),
        }
    }
    let mut supplement = Vec::new();
    for g in cases {
        let r = construct(g, PadFunction::power(1, 1).unwrap(), Mode::OneSided, 3)
            .and_then(|(cf, cert)| check_one_sided(g, &cf, &cert));
        supplement.push(format!("{g} {}", if r.is_ok() { "passes" } else { "fails" }));
    }
    let supplement = format!("with pad(q) = q instead: {}", supplement.join(", "));
    if failures.is_empty() {
        Ok(format!("all three regimes certified with the log pad; {supplement}"))
    } else {
        Err(format!("{}; {supplement}", failures.join("; ")))
    }
}

fn two_sided() -> Outcome {
    let mut seen = Vec::new();
    for g in ["24/5", "surd:51,336,15"] {
        let (cf, cert) = construct(g, PadFunction::power(1, 1).unwrap(), Mode::TwoSided, 2)?;
        for b in &cert.blocks {
            ensure(b.m > 20 && b.n > 20, || format!("{g}: block {} has m = {}, n = {}", b.block, b.m, b.n))?;
            let e = cert.entries.iter().find(|e| e.n == b.k).ok_or("marked index missing")?;
            let band =
                e.class.holds(&e.lambda, &e.q_n, &cert.gamma, &cert.pad, &cert.epsilon).map_err(|e| e.to_string())?;
            ensure(e.class == EntryClass::MarkedBand && band, || format!("{g}: lambda_{} outside the band", b.k))?;
        }
        let r = recheck_certificate(&cert, &cf).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{g}: recheck failed: {:?}", r.failure))?;
        seen.push(format!("{g}: (m, n) = {:?}", cert.blocks.iter().map(|b| (b.m, b.n)).collect::<Vec<_>>()));
    }
    Ok(format!("pad(q) = q, marked indices inside the band; {}", seen.join("; ")))
}

fn finite_range(cf: &CfExpansion, cert: &Certificate, bound: u64) -> Result<String, String> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let minus =
        enumerate_parallel(cf, &cert.gamma, &cert.pad, Sign::Minus, bound, threads).map_err(|e| e.to_string())?;
    ensure(minus.undecided.is_empty(), || "undecided fractions under sign minus".into())?;
    let beyond = minus.solutions.iter().filter(|s| cert.threshold_q.as_ref().is_none_or(|t| &s.q > t)).count();
    ensure(beyond == 0, || format!("{beyond} sign-minus solutions beyond the threshold q"))?;
    let none = enumerate_parallel(cf, &cert.gamma, &cert.pad, Sign::None, bound, threads).map_err(|e| e.to_string())?;
    let qs: BTreeSet<BigInt> = none.solutions.iter().map(|s| s.q.clone()).collect();
    let table = convergent_fractions(cf, cert.blocks[1].k).map_err(|e| e.to_string())?;
    for b in &cert.blocks[..2] {
        let q = &table[b.k - 1].1;
        ensure(qs.contains(q), || {
            format!("q_(k{}-1) = {q} is not among the sign-none solutions up to {bound}", b.block)
        })?;
    }
    Ok(format!("{} sign-minus solutions, marked convergents found", minus.solutions.len()))
}

fn exactness(literal: &Result<(CfExpansion, Certificate), String>) -> Outcome {
    let literal = literal
        .as_ref()
        .map_err(|e| format!("no gamma = 21/4 construction to test ({e})"))
        .and_then(|(cf, cert)| finite_range(cf, cert, 5000));
    let (cf, cert) = construct("21/4", PadFunction::power(1, 1).unwrap(), Mode::OneSided, 3)?;
    let pad = cert.pad.clone();
    let supplement = match finite_range(&cf, &cert, 5000) {
        Ok(d) => format!("pad(q) = q: {d}"),
        Err(e) => {
            let mut parts = vec![format!("pad(q) = q: {e}")];
            for b in &cert.blocks[..2] {
                let d = convergent_predicate(&cf, &cert.gamma, &pad, Sign::None, b.k - 1).map_err(|e| e.to_string())?;
                let q = &convergent_fractions(&cf, b.k - 1).map_err(|e| e.to_string())?[b.k - 1].1;
                parts.push(format!(
                    "q_(k{}-1) = {q} solves it by the convergent predicate: {}",
                    b.block,
                    d == Decision::True
                ));
            }
            parts.join("; ")
        }
    };
    match literal {
        Ok(d) => Ok(format!("{d}; {supplement}")),
        Err(e) => Err(format!("{e}; {supplement}")),
    }
}

fn random_alpha(rng: &mut ChaCha8Rng) -> CfExpansion {
    let pre: Vec<u64> = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(1..9)).collect();
    let period: Vec<u64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(1..9)).collect();
    CfExpansion::new(rng.gen_range(-3..4), pre, Tail::Periodic(period)).unwrap()
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bound = 2000u64;
    let pad = PadFunction::power(1, 1).unwrap();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut total = 0;
    for i in 0..20 {
        let alpha = random_alpha(&mut rng);
        // γ ≥ 2 makes every solution a convergent, so both sides see the same set.
        let gamma = if i % 4 == 3 {
            surd(rng.gen_range(4..12), rng.gen_range(2..30), 2)
        } else {
            QuadraticSurd::from_rational(BigRational::new(rng.gen_range(200..600).into(), 100.into()))
        };
        let gamma = if gamma < int(2) { int(2) } else { gamma };
        let sign = if i % 2 == 0 { Sign::None } else { Sign::Minus };
        let brute = enumerate_parallel(&alpha, &gamma, &pad, sign, bound, threads).map_err(|e| e.to_string())?;
        ensure(brute.undecided.is_empty(), || format!("pair {i}: undecided fractions"))?;
        let brute: BTreeSet<_> = brute.solutions.into_iter().map(|s| (s.p, s.q)).collect();
        let mut conv = BTreeSet::new();
        for (n, (p, q)) in convergent_fractions(&alpha, 60).map_err(|e| e.to_string())?.into_iter().enumerate() {
            if q > BigInt::from(bound) {
                break;
            }
            match convergent_predicate(&alpha, &gamma, &pad, sign, n).map_err(|e| e.to_string())? {
                Decision::True => {
                    conv.insert((p, q));
                }
                Decision::False => {}
                Decision::Undecided => return Err(format!("pair {i}: convergent {n} undecided")),
            }
        }
        ensure(brute == conv, || format!("pair {i}: brute force {brute:?} vs convergents {conv:?}"))?;
        total += brute.len();
    }
    Ok(format!("20 pairs agree, {total} solutions in all"))
}

/// Every number occurring in a solution of the Markoff equation with all
/// entries at most `limit`, found by solving for the largest entry.
fn markoff_brute(limit: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for a in 1..=limit {
        for b in a..=limit {
            // c² − 3ab·c + a² + b² = 0
            let disc = 9 * a * a * b * b - 4 * (a * a + b * b);
            let r = disc.isqrt();
            if r * r != disc {
                continue;
            }
            for num in [3 * a * b + r, 3 * a * b - r] {
                let c = num / 2;
                if num % 2 == 0 && c >= b && c <= limit && a * a + b * b + c * c == 3 * a * b * c {
                    out.extend([a, b, c]);
                }
            }
        }
    }
    out
}

fn value(name: &str) -> QuadraticSurd {
    let c = constant(name).unwrap();
    c.value.exact().cloned().unwrap_or_else(|| match c.value {
        exactapprox_core::spectrum::ConstantValue::Approximate(r) => QuadraticSurd::from_rational(r),
        _ => unreachable!(),
    })
}

fn chain_break(names: &[&str]) -> Option<String> {
    names.windows(2).find(|w| value(w[0]) >= value(w[1])).map(|w| {
        format!("{} = {} is not below {} = {}", w[0], value(w[0]).to_decimal(5), w[1], value(w[1]).to_decimal(5))
    })
}

fn spectrum() -> Outcome {
    let expected = [1, 2, 5, 13, 29, 34, 89, 169, 194, 233, 433, 610, 985];
    let ms = markoff_numbers(1000);
    ensure(ms == expected, || format!("markoff_numbers(1000) = {ms:?}"))?;
    let brute: Vec<u64> = markoff_brute(1000).into_iter().collect();
    ensure(brute == expected, || format!("brute force finds {brute:?}"))?;
    let l = |m| lagrange_value(m).unwrap();
    ensure(l(1) == QuadraticSurd::sqrt(5u32) && l(2) == QuadraticSurd::sqrt(8u32) && l(5) == surd(0, 221, 5), || {
        "Lagrange values differ".into()
    })?;
    let stated = [
        "sqrt5",
        "sqrt8",
        "sqrt221_over_5",
        "three",
        "threshold_thm3",
        "mu0_reference",
        "hall_gap_point",
        "limit_repr6",
    ];
    let true_order = [
        "sqrt5",
        "sqrt8",
        "sqrt221_over_5",
        "three",
        "mu0_reference",
        "threshold_thm3",
        "hall_gap_point",
        "limit_repr6",
    ];
    let fixtures = "Markoff list, brute-force cross-check and Lagrange values match";
    if let Some(b) = chain_break(&true_order) {
        return Err(format!("{fixtures}; even the corrected chain breaks: {b}"));
    }
    match chain_break(&stated) {
        None => Ok(format!("{fixtures}; ordering chain holds")),
        Some(b) => Err(format!(
            "{fixtures}; stated chain fails: {b}; the chain with mu0_reference before threshold_thm3 holds"
        )),
    }
}

fn run_construct(out: &Path, pad: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_exactapprox"))
        .args(["construct", "--gamma", "21/4", "--pad", pad, "--blocks", "3", "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        let err = String::from_utf8_lossy(&status.stderr);
        return Err(format!(
            "exit {:?}: {}",
            status.status.code(),
            err.lines().next().unwrap_or("").chars().take(120).collect::<String>()
        ));
    }
    let read = |f: &str| std::fs::read(out.join(f)).map_err(|e| e.to_string());
    Ok((read("alpha.json")?, read("certificate.json")?))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let twice = |pad: &str| -> Result<(), String> {
        let a = run_construct(&dir.path().join(format!("{pad}-a")), pad)?;
        let b = run_construct(&dir.path().join(format!("{pad}-b")), pad)?;
        ensure(a == b, || "artifacts differ between runs".into())
    };
    let supplement = match twice("power:1/1") {
        Ok(()) => "with pad(q) = q both runs are byte-identical".to_string(),
        Err(e) => format!("with pad(q) = q: {e}"),
    };
    match twice("log") {
        Ok(()) => Ok(format!("digit streams and certificates byte-identical; {supplement}")),
        Err(e) => Err(format!("log pad run produced no artifacts ({e}); {supplement}")),
    }
}

fn main() {
    let minute = Duration::from_secs(60);
    let mut passed = Vec::new();
    passed.push(criterion(1, "surd identities", Duration::from_secs(1), identities));
    passed.push(criterion(2, "Perron residual", Duration::from_secs(10), perron));
    passed.push(criterion(3, "decomposition", 2 * minute, decomposition));
    // Shared by criteria 4 and 6; its time is charged to criterion 4.
    let mut literal = None;
    passed.push(criterion(4, "one-sided construction, log pad", 5 * minute, || {
        let built = construct("21/4", PadFunction::Log, Mode::OneSided, 3);
        let r = one_sided(&built);
        literal = Some(built);
        r
    }));
    passed.push(criterion(5, "two-sided construction", 5 * minute, two_sided));
    let literal = literal.unwrap_or_else(|| Err("construction panicked".into()));
    passed.push(criterion(6, "finite-range exactness", 2 * minute, || exactness(&literal)));
    passed.push(criterion(7, "oracle equivalence", minute, oracle));
    passed.push(criterion(8, "spectrum fixtures", Duration::from_secs(10), spectrum));
    passed.push(criterion(9, "determinism", 10 * minute, determinism));
    let ok = passed.iter().filter(|&&p| p).count();
    println!("{ok} of {} criteria pass", passed.len());
    if ok != passed.len() {
        std::process::exit(1);
    }
}
