//! Markoff numbers, the discrete part of the Lagrange spectrum and a catalog
//! of named constants.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::cf::periodic_value;
use crate::error::{Error, Result};
use crate::surd::QuadraticSurd;

/// A solution of `m² + m1² + m2² = 3·m·m1·m2` with `m1, m2 ≤ m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkoffTriple {
    pub m: u64,
    pub m1: u64,
    pub m2: u64,
}

impl MarkoffTriple {
    pub fn new(m: u64, m1: u64, m2: u64) -> Result<Self> {
        let t = MarkoffTriple { m, m1, m2 };
        if m1 == 0 || m2 == 0 || m1 > m || m2 > m || !t.satisfies() {
            return Err(Error::InvalidParams(alloc::format!("({m}, {m1}, {m2}) is not a Markoff triple")));
        }
        Ok(t)
    }

    fn satisfies(&self) -> bool {
        let (a, b, c) = (self.m as u128, self.m1 as u128, self.m2 as u128);
        let lhs = a * a + b * b + c * c;
        match a.checked_mul(b).and_then(|x| x.checked_mul(c)).and_then(|x| x.checked_mul(3)) {
            Some(rhs) => lhs == rhs,
            None => false,
        }
    }
}

/// All Markoff triples whose largest entry is at most `limit`, sorted.
pub fn markoff_triples(limit: u64) -> Vec<MarkoffTriple> {
    if limit == 0 {
        return Vec::new();
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let root = [1u64, 1, 1];
    seen.insert(root);
    queue.push_back(root);
    while let Some(t) = queue.pop_front() {
        for i in 0..3 {
            let (a, b) = (t[(i + 1) % 3] as u128, t[(i + 2) % 3] as u128);
            // Vieta move: x ↦ 3ab − x. Values past the limit only lead further out.
            let Some(v) = (3 * a).checked_mul(b).and_then(|p| p.checked_sub(t[i] as u128)) else { continue };
            if v == 0 || v > limit as u128 {
                continue;
            }
            let mut n = t;
            n[i] = v as u64;
            n.sort_unstable();
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.into_iter().map(|[a, b, c]| MarkoffTriple { m: c, m1: b, m2: a }).collect()
}

/// Sorted distinct Markoff numbers up to `limit`.
pub fn markoff_numbers(limit: u64) -> Vec<u64> {
    let mut ms: Vec<u64> = markoff_triples(limit).into_iter().flat_map(|t| [t.m, t.m1, t.m2]).collect();
    ms.sort_unstable();
    ms.dedup();
    ms
}

/// `L(m) = √(9m² − 4)/m` for a Markoff number `m`.
pub fn lagrange_value(m: u64) -> Result<QuadraticSurd> {
    if m == 0 || markoff_numbers(m).last() != Some(&m) {
        return Err(Error::NotMarkoff(m));
    }
    let m = BigInt::from(m);
    let d = BigUint::try_from(BigInt::from(9) * &m * &m - 4).expect("positive");
    QuadraticSurd::new(0, d, m)
}

/// `180/γ²`.
pub fn bw_omega(gamma: &QuadraticSurd) -> Result<QuadraticSurd> {
    let sq = gamma.checked_mul(gamma)?;
    Ok(sq.recip()?.mul_rational(&BigRational::from_integer(180.into())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantValue {
    Exact(QuadraticSurd),
    /// Known only to the stated decimals; never used in exact comparisons.
    Approximate(BigRational),
}

impl ConstantValue {
    pub fn to_decimal(&self, digits: u32) -> alloc::string::String {
        match self {
            ConstantValue::Exact(s) => s.to_decimal(digits),
            ConstantValue::Approximate(r) => crate::surd::rational_to_decimal(r, digits),
        }
    }

    pub fn exact(&self) -> Option<&QuadraticSurd> {
        match self {
            ConstantValue::Exact(s) => Some(s),
            ConstantValue::Approximate(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedConstant {
    pub name: &'static str,
    pub value: ConstantValue,
    pub note: &'static str,
}

fn surd(p: i64, d: u64, q: i64) -> QuadraticSurd {
    QuadraticSurd::new(p, d, q).expect("valid constant")
}

fn int(n: i64) -> QuadraticSurd {
    QuadraticSurd::from(n)
}

/// `[0; pre, period, period, …]`.
fn periodic(pre: &[u64], period: &[u64]) -> QuadraticSurd {
    periodic_value(&BigInt::from(0), pre, period)
}

/// `(51 + 4√21)/15 = 4 + [0; 3, 1, 3, 1, …] + [0; 2, 1, 3, 1, 3, …]`.
pub fn threshold() -> QuadraticSurd {
    crate::cantor::threshold()
}

/// `2 + 4√21/7`, the supremum of `λ_n` over the blocks of the two-sided
/// construction away from the marked indices.
pub fn two_sided_bound() -> QuadraticSurd {
    int(2) + QuadraticSurd::sqrt(21u32).mul_rational(&BigRational::new(4.into(), 7.into()))
}

/// The catalog, in increasing order of value where exact.
pub fn constants() -> Vec<NamedConstant> {
    use ConstantValue::{Approximate, Exact};
    let mut out = alloc::vec![
        NamedConstant { name: "f4_sum_lo", value: Exact(surd(-1, 2, 1)), note: "left end of F4 + F4" },
        NamedConstant {
            name: "fj_sum_lo",
            value: Exact(int(5) - QuadraticSurd::sqrt(21u32)),
            note: "left end of the Freiman-Judin sum interval, 5 - sqrt(21)"
        },
        NamedConstant {
            name: "f3_sum_lo",
            value: Exact(&periodic(&[], &[3, 1]) + &periodic(&[2], &[1, 3])),
            note: "[0; (3,1)*] + [0; 2, (1,3)*], left end of the F3 + F3 interval",
        },
        NamedConstant {
            name: "f3_sum_hi",
            value: Exact(&periodic(&[], &[1, 3]) + &periodic(&[1, 2], &[1, 3])),
            note: "[0; (1,3)*] + [0; 1, 2, (1,3)*], right end of the F3 + F3 interval",
        },
        NamedConstant {
            name: "fj_sum_hi",
            value: Exact(surd(-3, 21, 1)),
            note: "right end of the Freiman-Judin sum interval"
        },
        NamedConstant { name: "f4_sum_hi", value: Exact(surd(-4, 32, 1)), note: "right end of F4 + F4, 4 sqrt(2) - 4" },
        NamedConstant { name: "sqrt5", value: Exact(QuadraticSurd::sqrt(5u32)), note: "Hurwitz constant, L(1)" },
        NamedConstant { name: "sqrt8", value: Exact(QuadraticSurd::sqrt(8u32)), note: "L(2)" },
        NamedConstant { name: "sqrt221_over_5", value: Exact(surd(0, 221, 5)), note: "L(5)" },
        NamedConstant { name: "three", value: Exact(int(3)), note: "limit of the discrete spectrum" },
        NamedConstant {
            name: "two_sided_bound",
            value: Exact(two_sided_bound()),
            note: "2 + 4 sqrt(21)/7, bound on unmarked lambda_n in two-sided blocks",
        },
        NamedConstant {
            name: "mu0_reference",
            value: Approximate(BigRational::new(45278.into(), 10000.into())),
            note: "origin of Hall's ray, approximate (4.5278)",
        },
        NamedConstant { name: "threshold_thm3", value: Exact(threshold()), note: "4 + [0; (3,1)*] + [0; 2, (1,3)*]" },
        NamedConstant {
            name: "non_admissible_example",
            value: Exact(&(&int(3) + &periodic(&[3, 3, 2, 1], &[1, 2])) + &periodic(&[2, 1], &[1, 2])),
            note: "[3; 3, 3, 2, 1, (1,2)*] + [0; 2, 1, (1,2)*], in the spectrum but not admissible",
        },
        NamedConstant {
            name: "limit_repr4",
            value: Exact(int(5)),
            note: "limit of lambda_n near the C pattern with digits 3, 1, 4"
        },
        NamedConstant {
            name: "limit_repr5",
            value: Exact(QuadraticSurd::from_rational(BigRational::new(16.into(), 3.into()))),
            note: "4 + 1/3 + 1, bound on unmarked lambda_n with digits from FJ",
        },
        NamedConstant {
            name: "hall_gap_point",
            value: Exact(int(10) - QuadraticSurd::sqrt(21u32)),
            note: "10 - sqrt(21)"
        },
        NamedConstant {
            name: "limit_repr6",
            value: Exact(int(6)),
            note: "limit of lambda_n near the C pattern with digits 4, 1, 5"
        },
    ];
    out.sort_by(|a, b| match (&a.value, &b.value) {
        (ConstantValue::Exact(x), ConstantValue::Exact(y)) => x.cmp(y),
        _ => core::cmp::Ordering::Equal,
    });
    out
}

/// Looks a constant up by name.
pub fn constant(name: &str) -> Option<NamedConstant> {
    constants().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_markoff_lists() {
        assert_eq!(markoff_numbers(0), Vec::<u64>::new());
        assert_eq!(markoff_numbers(5), [1, 2, 5]);
        assert_eq!(markoff_numbers(100), [1, 2, 5, 13, 29, 34, 89]);
        for t in markoff_triples(1000) {
            assert!(MarkoffTriple::new(t.m, t.m1, t.m2).is_ok());
        }
    }

    #[test]
    fn lagrange_values() {
        assert_eq!(lagrange_value(1).unwrap(), QuadraticSurd::sqrt(5u32));
        assert_eq!(lagrange_value(2).unwrap(), QuadraticSurd::sqrt(8u32));
        assert_eq!(lagrange_value(5).unwrap(), surd(0, 221, 5));
        assert!(matches!(lagrange_value(3), Err(Error::NotMarkoff(3))));
    }

    #[test]
    fn omega_at_sqrt5() {
        assert_eq!(bw_omega(&QuadraticSurd::sqrt(5u32)).unwrap(), int(36));
    }

    #[test]
    fn named_decimals() {
        let get = |n: &str| constant(n).unwrap().value.to_decimal(5);
        assert_eq!(get("threshold_thm3"), "4.62202");
        assert_eq!(get("hall_gap_point"), "5.41742");
        assert_eq!(constant("f3_sum_hi").unwrap().value.to_decimal(8), "1.52752523");
        assert_eq!(threshold(), &int(4) + &constant("f3_sum_lo").unwrap().value.exact().unwrap().clone());
    }
}
