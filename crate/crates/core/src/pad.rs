//! Padding functions `ϖ(q)` evaluated exactly at integer arguments.
//!
//! Textual forms: `log` for a rational lower bound of `ln(q + 2)`,
//! `power:a/b` for `⌊q^(a/b)⌋` with `0 < a/b < 2`, and
//! `table:q1=v1,q2=v2,…` for a step function.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::surd::{format_ratio, parse_rational};

/// Fractional bits kept by the logarithm lower bound.
const LOG_BITS: usize = 64;

/// Working precision of the logarithm series.
const FIXED_BITS: usize = 192;

/// Exponent of the largest ladder point used by [`PadFunction::validate`].
pub const LADDER_TOP: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PadFunction {
    /// A lower bound of `ln(q + 2)` on a `2^-64` grid, never off by more
    /// than `2^-62`.
    Log,
    /// `⌊q^(num/den)⌋`.
    Power { num: u32, den: u32 },
    /// `ϖ(q) = v_i` for `q_i ≤ q < q_{i+1}`; only defined on `[q_1, q_last]`.
    Table(Vec<(BigUint, BigRational)>),
}

impl PadFunction {
    pub fn power(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num >= 2 * den {
            return Err(Error::InvalidPad(format!("exponent {num}/{den} must lie in (0, 2)")));
        }
        let g = num.gcd(&den);
        Ok(PadFunction::Power { num: num / g, den: den / g })
    }

    pub fn table(mut entries: Vec<(BigUint, BigRational)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPad("empty table".into()));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidPad(format!("duplicate table key {}", w[0].0)));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidPad(format!("table decreases at q = {}", w[1].0)));
            }
        }
        if entries.iter().any(|(_, v)| !v.is_positive()) {
            return Err(Error::InvalidPad("table values must be positive".into()));
        }
        Ok(PadFunction::Table(entries))
    }

    /// `ϖ(q)` for `q ≥ 1`.
    pub fn eval(&self, q: &BigInt) -> Result<BigRational> {
        if !q.is_positive() {
            return Err(Error::InvalidPad(format!("argument {q} is not a positive integer")));
        }
        let q = q.magnitude();
        match self {
            PadFunction::Log => Ok(ln_lower(&(q + 2u32))),
            PadFunction::Power { num, den } => Ok(BigRational::from_integer(BigInt::from(q.pow(*num).nth_root(*den)))),
            PadFunction::Table(entries) => {
                let last = &entries.last().expect("nonempty").0;
                if q < &entries[0].0 || q > last {
                    return Err(Error::OutOfTable { q: q.to_string() });
                }
                let i = entries.partition_point(|(k, _)| k <= q) - 1;
                Ok(entries[i].1.clone())
            }
        }
    }

    /// Checks monotonicity on the ladder `q = 2^j`, `j ≤ 64` (restricted to
    /// the table range for tables), and growth across it for the closed-form
    /// families.
    pub fn validate(&self) -> Result<()> {
        let ladder: Vec<BigInt> = (0..=LADDER_TOP).map(|j| BigInt::one() << j as usize).collect();
        let points: Vec<&BigInt> = match self {
            PadFunction::Table(entries) => {
                let lo = BigInt::from(entries[0].0.clone());
                let hi = BigInt::from(entries.last().expect("nonempty").0.clone());
                ladder.iter().filter(|q| **q >= lo && **q <= hi).collect()
            }
            _ => ladder.iter().collect(),
        };
        let mut prev: Option<BigRational> = None;
        for q in &points {
            let v = self.eval(q)?;
            if !v.is_positive() {
                return Err(Error::InvalidPad(format!("value at q = {q} is not positive")));
            }
            if prev.as_ref().is_some_and(|p| &v < p) {
                return Err(Error::InvalidPad(format!("decreases at q = {q}")));
            }
            prev = Some(v);
        }
        if !matches!(self, PadFunction::Table(_)) {
            let first = self.eval(&BigInt::one())?;
            if prev.is_none_or(|p| p <= first) {
                return Err(Error::InvalidPad("does not grow along the sample ladder".into()));
            }
        }
        Ok(())
    }

    /// Least `q` with `ϖ(q) ≥ target`, searched over `1 ≤ q ≤ 2^cap_bits`.
    /// Used for diagnostics only.
    pub fn inverse(&self, target: &BigRational, cap_bits: u32) -> Option<BigInt> {
        let cap = BigInt::one() << cap_bits as usize;
        let ok = |q: &BigInt| self.eval(q).is_ok_and(|v| &v >= target);
        if !ok(&cap) {
            return None;
        }
        let (mut lo, mut hi) = (BigInt::zero(), cap);
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1usize;
            if ok(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    pub fn parse(input: &str) -> Result<Self> {
        let err = |position: usize, message: &str| Error::Parse {
            input: input.to_string(),
            position,
            message: message.to_string(),
        };
        let trimmed = input.trim();
        let offset = input.len() - input.trim_start().len();
        if trimmed == "log" {
            return Ok(PadFunction::Log);
        }
        if let Some(rest) = trimmed.strip_prefix("power:") {
            let base = offset + "power:".len();
            let (a, b) = rest.split_once('/').unwrap_or((rest, "1"));
            let num: u32 = a.trim().parse().map_err(|_| err(base, "expected an integer numerator"))?;
            let den: u32 = b.trim().parse().map_err(|_| err(base + a.len() + 1, "expected an integer denominator"))?;
            return Self::power(num, den).map_err(|e| err(base, &e.to_string()));
        }
        if let Some(rest) = trimmed.strip_prefix("table:") {
            let mut pos = offset + "table:".len();
            let mut entries = Vec::new();
            for item in rest.split(',') {
                let (k, v) = item.split_once('=').ok_or_else(|| err(pos, "expected q=value"))?;
                let key: BigUint = k.trim().parse().map_err(|_| err(pos, "expected an integer q"))?;
                if key.is_zero() {
                    return Err(err(pos, "table keys must be positive"));
                }
                let val = parse_rational(v.trim()).map_err(|_| err(pos + k.len() + 1, "expected a rational value"))?;
                entries.push((key, val));
                pos += item.len() + 1;
            }
            return Self::table(entries).map_err(|e| err(offset, &e.to_string()));
        }
        Err(err(offset, "expected log, power:a/b or table:q=v,..."))
    }
}

impl fmt::Display for PadFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadFunction::Log => f.write_str("log"),
            PadFunction::Power { num, den } => write!(f, "power:{num}/{den}"),
            PadFunction::Table(entries) => {
                let items: Vec<String> = entries.iter().map(|(k, v)| format!("{k}={}", format_ratio(v))).collect();
                write!(f, "table:{}", items.join(","))
            }
        }
    }
}

impl core::str::FromStr for PadFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `2·atanh(t) = 2·Σ t^(2k+1)/(2k+1)` truncated; every term is positive, so
/// truncation bounds from below. `t ≤ 1/3` makes 48 terms far more than
/// enough for the 64-bit output grid.
fn two_atanh_lower(num: &BigUint, den: &BigUint) -> BigUint {
    // Fixed point with FIXED_BITS fractional bits. Every term is positive and
    // rounded down, and the dropped tail is positive, so the sum stays below
    // 2·atanh(num/den).
    let t = (num << FIXED_BITS) / den;
    let t2 = (&t * &t) >> FIXED_BITS;
    let mut power = t;
    let mut sum = BigUint::zero();
    for k in 0..48u32 {
        sum += &power / BigUint::from(2 * k + 1);
        power = (&power * &t2) >> FIXED_BITS;
    }
    sum << 1
}

/// Rational lower bound of `ln x` for `x ≥ 1`, on a `2^-64` grid.
fn ln_lower(x: &BigUint) -> BigRational {
    let b = x.bits() as usize - 1;
    // y = x / 2^b ∈ [1, 2), truncated to LOG_BITS fractional bits (so y' ≤ y).
    let y = if b > LOG_BITS { x >> (b - LOG_BITS) } else { x << (LOG_BITS - b) };
    let one = BigUint::one() << LOG_BITS;
    let ln2 = two_atanh_lower(&BigUint::one(), &BigUint::from(3u32));
    let total = ln2 * BigUint::from(b) + two_atanh_lower(&(&y - &one), &(&y + &one));
    let scaled = total >> (FIXED_BITS - LOG_BITS);
    BigRational::new(BigInt::from(scaled), BigInt::one() << LOG_BITS)
}
