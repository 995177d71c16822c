//! Closed-form values that the exact arithmetic must reproduce with no
//! tolerance at all.

use exactapprox_core::cf::periodic_value;
use exactapprox_core::spectrum::{constant, two_sided_bound};
use exactapprox_core::{BigInt, BigRational, QuadraticSurd};

fn cf(a0: i64, pre: &[u64], period: &[u64]) -> QuadraticSurd {
    periodic_value(&BigInt::from(a0), pre, period)
}

fn int(n: i64) -> QuadraticSurd {
    QuadraticSurd::from(n)
}

#[test]
fn c_block_limits() {
    assert_eq!(&cf(4, &[4], &[1, 3]) + &cf(0, &[], &[1, 3]), int(5));
    assert_eq!(&cf(5, &[5], &[1, 4]) + &cf(0, &[], &[1, 4]), int(6));
}

#[test]
fn two_sided_bound_sits_below_the_threshold() {
    let b = &cf(3, &[1, 4], &[1, 3]) + &cf(0, &[], &[1, 3]);
    assert_eq!(b, two_sided_bound());
    let t = &cf(4, &[], &[3, 1]) + &cf(0, &[2], &[1, 3]);
    assert_eq!(t, QuadraticSurd::new(51 * 7, 16u32 * 21 * 49, 15 * 7).unwrap());
    assert!(b < t);
}

#[test]
fn hall_endpoints() {
    assert_eq!(&cf(0, &[], &[4, 1]) + &cf(0, &[], &[4, 1]), QuadraticSurd::new(-1, 2u32, 1).unwrap());
    assert_eq!(&cf(0, &[], &[1, 4]) + &cf(0, &[], &[1, 4]), QuadraticSurd::new(-4, 32u32, 1).unwrap());
}

#[test]
fn golden_ratio_and_silver_ratio() {
    let phi = cf(1, &[], &[1]);
    assert_eq!(&phi * &phi, &phi + &int(1));
    assert_eq!(cf(1, &[], &[2]), QuadraticSurd::sqrt(2u32));
    assert_eq!(cf(2, &[], &[4]), QuadraticSurd::sqrt(5u32));
}

#[test]
fn decimal_rendering_rounds_to_nearest() {
    assert_eq!(QuadraticSurd::sqrt(2u32).to_decimal(10), "1.4142135624");
    assert_eq!(constant("hall_gap_point").unwrap().value.to_decimal(8), "5.41742431");
    let r = QuadraticSurd::from_rational(BigRational::new((-1).into(), 3.into()));
    assert_eq!(r.to_decimal(4), "-0.3333");
}
