//! Block constructions end to end: build, certify, re-check and tamper.

use exactapprox_core::construct::{EntryClass, Mode};
use exactapprox_core::surd::parse_exact;
use exactapprox_core::verify::{convergent_predicate, Decision, Sign};
use exactapprox_core::{
    build_alpha, recheck_certificate, represent_gamma, BigInt, Certificate, CfExpansion, ConstructionParams, Error,
    PadFunction, RationalInterval,
};

fn build(gamma: &str, pad: &str, mode: Mode, blocks: usize) -> (CfExpansion, Certificate) {
    let gamma = parse_exact(gamma).unwrap();
    let params = ConstructionParams::new(gamma.clone(), pad.parse().unwrap(), mode).unwrap();
    let mut rep = represent_gamma(&gamma).unwrap();
    build_alpha(&params, &mut rep, blocks).unwrap()
}

fn check_shape(cf: &CfExpansion, cert: &Certificate, blocks: usize) {
    assert_eq!(cert.blocks.len(), blocks);
    assert!(cert.undecided.is_empty());
    assert_eq!(cert.entries.len(), cf.digits.len());
    for w in cert.blocks.windows(2) {
        assert!(w[0].m < w[1].m && w[0].n < w[1].n);
    }
    let marked = cert.marked_class();
    for e in &cert.entries {
        let is_marked = cert.blocks.iter().any(|b| b.k == e.n);
        assert_eq!(is_marked, e.class == marked, "index {}", e.n);
        if !is_marked {
            assert_eq!(e.class, EntryClass::BelowMargin);
            assert!(e.lambda.hi() < &cert.gamma.enclose(128).lo().clone());
        }
    }
    assert!(recheck_certificate(cert, cf).unwrap().passed());
}

#[test]
fn one_sided_in_each_regime() {
    for g in ["21/4", "28/5", "7"] {
        let (cf, cert) = build(g, "power:1/1", Mode::OneSided, 3);
        check_shape(&cf, &cert, 3);
        assert_eq!(cert.marked_class(), EntryClass::MarkedAbove);
        for b in &cert.blocks {
            assert_eq!(b.m % 2, b.n % 2);
            let e = cert.entries.iter().find(|e| e.n == b.k).unwrap();
            assert_eq!(e.lambda.cmp_surd(&cert.gamma), Some(std::cmp::Ordering::Greater));
        }
    }
}

#[test]
fn two_sided_blocks_are_long_enough() {
    for g in ["24/5", "surd:51,336,15"] {
        let (cf, cert) = build(g, "power:1/1", Mode::TwoSided, 2);
        check_shape(&cf, &cert, 2);
        assert_eq!(cert.marked_class(), EntryClass::MarkedBand);
        assert!(cert.blocks.iter().all(|b| b.m > 20 && b.n > 20));
    }
}

#[test]
fn marked_convergents_solve_the_plain_inequality() {
    let (cf, cert) = build("21/4", "power:1/1", Mode::OneSided, 2);
    let pad = PadFunction::power(1, 1).unwrap();
    for b in &cert.blocks {
        let d = convergent_predicate(&cf, &cert.gamma, &pad, Sign::None, b.k - 1).unwrap();
        assert_eq!(d, Decision::True);
        let d = convergent_predicate(&cf, &cert.gamma, &pad, Sign::Plus, b.k - 1).unwrap();
        assert_eq!(d, Decision::True);
    }
}

#[test]
fn construction_is_deterministic() {
    let a = build("28/5", "power:1/1", Mode::OneSided, 2);
    let b = build("28/5", "power:1/1", Mode::OneSided, 2);
    assert_eq!(a, b);
}

#[test]
fn log_pad_stops_with_a_diagnostic() {
    let gamma = parse_exact("21/4").unwrap();
    let params = ConstructionParams::new(gamma.clone(), PadFunction::Log, Mode::OneSided).unwrap().with_caps(300, 300);
    let mut rep = represent_gamma(&gamma).unwrap();
    match build_alpha(&params, &mut rep, 1) {
        Err(Error::PadTooSlow { block, .. }) => assert_eq!(block, 1),
        other => panic!("expected PadTooSlow, got {other:?}"),
    }
}

#[test]
fn rejected_parameters() {
    let pad = PadFunction::power(1, 1).unwrap();
    assert!(ConstructionParams::new(parse_exact("5").unwrap(), pad.clone(), Mode::OneSided).is_err());
    assert!(ConstructionParams::new(parse_exact("4.6").unwrap(), pad.clone(), Mode::TwoSided).is_err());
    assert!(ConstructionParams::new(parse_exact("9/2").unwrap(), pad, Mode::TwoSided).is_err());
}

#[test]
fn tampering_is_caught() {
    let (cf, cert) = build("21/4", "power:1/1", Mode::OneSided, 2);

    let mut digits = cf.digits.clone();
    let i = cert.blocks[0].k + 3;
    digits[i] = if digits[i] == 1 { 2 } else { 1 };
    let forged = CfExpansion { digits, ..cf.clone() };
    assert!(!recheck_certificate(&cert, &forged).unwrap().passed());

    let mut c = cert.clone();
    let k = c.blocks[0].k;
    let e = c.entries.iter_mut().find(|e| e.n == k).unwrap();
    e.lambda = RationalInterval::point(cert.gamma.enclose(64).lo().clone());
    assert!(!recheck_certificate(&c, &cf).unwrap().passed());

    let mut c = cert.clone();
    c.threshold_q = Some(BigInt::from(7));
    let r = recheck_certificate(&c, &cf).unwrap();
    assert!(r.failure.is_some_and(|f| f.n.is_none()));

    let mut c = cert.clone();
    c.entries.retain(|e| e.n != k);
    assert!(!recheck_certificate(&c, &cf).unwrap().passed());
}
