//! Quadratic surds `a + b·√d` with exact, total ordering.
//!
//! Values are stored as a rational part, a rational coefficient and a
//! radicand with small square factors removed. Arithmetic is closed inside a
//! single quadratic field; comparisons work across fields.

use alloc::format;
use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::RationalInterval;

/// Largest trial divisor used when stripping square factors off a radicand.
const SQUARE_STRIP_LIMIT: u64 = 1 << 16;

/// The real number `rational + coeff·√radicand`.
///
/// `radicand` is zero exactly when the value is rational; otherwise it is at
/// least 2 and not a perfect square.
#[derive(Clone, Debug)]
pub struct QuadraticSurd {
    rational: BigRational,
    coeff: BigRational,
    radicand: BigUint,
}

impl QuadraticSurd {
    pub fn from_rational(r: BigRational) -> Self {
        QuadraticSurd { rational: r, coeff: BigRational::zero(), radicand: BigUint::zero() }
    }

    pub fn from_integer(i: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(i.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// `√d`.
    pub fn sqrt(d: impl Into<BigUint>) -> Self {
        Self::from_parts(BigRational::zero(), BigRational::one(), d.into())
    }

    /// `(p + √d) / q`, the canonical triple form.
    pub fn new(p: impl Into<BigInt>, d: impl Into<BigUint>, q: impl Into<BigInt>) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = BigRational::new(BigInt::one(), q);
        Ok(Self::from_parts(BigRational::from_integer(p.into()) * &inv, inv, d.into()))
    }

    /// `a + b·√d`, normalising the radicand.
    pub fn from_parts(a: BigRational, b: BigRational, d: BigUint) -> Self {
        if b.is_zero() || d.is_zero() {
            return Self::from_rational(a);
        }
        let (square, rest) = strip_squares(d);
        let b = b * BigRational::from_integer(BigInt::from(square));
        if rest.is_one() {
            return Self::from_rational(a + b);
        }
        let root = rest.sqrt();
        if &root * &root == rest {
            return Self::from_rational(a + b * BigRational::from_integer(BigInt::from(root)));
        }
        QuadraticSurd { rational: a, coeff: b, radicand: rest }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.rational.clone())
    }

    /// Canonical `(P, D, Q)` with value `(P + √D)/Q` and `Q | D − P²`.
    pub fn to_pdq(&self) -> (BigInt, BigUint, BigInt) {
        let (mut p, d, mut q) = if self.is_rational() {
            (self.rational.numer().clone(), BigInt::zero(), self.rational.denom().clone())
        } else {
            let l = self.rational.denom().lcm(self.coeff.denom());
            let a = self.rational.numer() * (&l / self.rational.denom());
            let b = self.coeff.numer() * (&l / self.coeff.denom());
            let d = &b * &b * BigInt::from(self.radicand.clone());
            if b.is_negative() {
                (-a, d, -l)
            } else {
                (a, d, l)
            }
        };
        let g = q.gcd(&(&d - &p * &p));
        let k = q.abs() / g;
        p *= &k;
        q *= &k;
        let d = d * &k * &k;
        (p, d.to_biguint().expect("radicand is non-negative"), q)
    }

    /// Sign as -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        sign_single(&self.rational, &self.coeff, &self.radicand)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Rewrites `other` over the radicand of `self` when both live in the
    /// same quadratic field.
    fn aligned(&self, other: &Self) -> Result<(BigUint, BigRational, BigRational)> {
        if other.is_rational() {
            return Ok((self.radicand.clone(), self.coeff.clone(), BigRational::zero()));
        }
        if self.is_rational() {
            return Ok((other.radicand.clone(), BigRational::zero(), other.coeff.clone()));
        }
        if self.radicand == other.radicand {
            return Ok((self.radicand.clone(), self.coeff.clone(), other.coeff.clone()));
        }
        let prod = &self.radicand * &other.radicand;
        let s = prod.sqrt();
        if &s * &s != prod {
            return Err(Error::IncompatibleRadicands);
        }
        // √d2 = √(d1·d2) / d1 · √d1
        let scale = BigRational::new(BigInt::from(s), BigInt::from(self.radicand.clone()));
        Ok((self.radicand.clone(), self.coeff.clone(), &other.coeff * scale))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let (d, b1, b2) = self.aligned(other)?;
        Ok(Self::raw(&self.rational + &other.rational, b1 + b2, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let (d, b1, b2) = self.aligned(other)?;
        Ok(Self::raw(&self.rational - &other.rational, b1 - b2, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let (d, b1, b2) = self.aligned(other)?;
        let dr = BigRational::from_integer(BigInt::from(d.clone()));
        let a = &self.rational * &other.rational + &b1 * &b2 * dr;
        let b = &self.rational * &b2 + &other.rational * &b1;
        Ok(Self::raw(a, b, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.signum() == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.rational.recip()));
        }
        let dr = BigRational::from_integer(BigInt::from(self.radicand.clone()));
        let norm = &self.rational * &self.rational - &self.coeff * &self.coeff * dr;
        Ok(Self::raw(&self.rational / &norm, -(&self.coeff / &norm), self.radicand.clone()))
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        Self::raw(&self.rational + r, self.coeff.clone(), self.radicand.clone())
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        Self::raw(&self.rational * r, &self.coeff * r, self.radicand.clone())
    }

    fn raw(a: BigRational, b: BigRational, d: BigUint) -> Self {
        if b.is_zero() || d.is_zero() {
            Self::from_rational(a)
        } else {
            QuadraticSurd { rational: a, coeff: b, radicand: d }
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        ordering(sign_single(&(&self.rational - r), &self.coeff, &self.radicand))
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        // b·√d = ±√(N/M) with N = bn²·d and M = bd²; √(N/M) = √(N·M)/M.
        let bn = self.coeff.numer().magnitude();
        let bd = self.coeff.denom().magnitude();
        let n = bn * bn * &self.radicand;
        let m = bd * bd;
        let s = (&n * &m).sqrt();
        let root = BigRational::new(BigInt::from(s), BigInt::from(m));
        let est = if self.coeff.is_negative() { &self.rational - root } else { &self.rational + root };
        let mut k = est.floor().to_integer();
        while self.cmp_rational(&BigRational::from_integer(k.clone())) == Ordering::Less {
            k -= 1;
        }
        while self.cmp_rational(&BigRational::from_integer(&k + 1)) != Ordering::Less {
            k += 1;
        }
        k
    }

    /// Enclosure on the dyadic grid of spacing `2^-bits`; a point when rational.
    pub fn enclose(&self, bits: u32) -> RationalInterval {
        if let Some(r) = self.to_rational() {
            return RationalInterval::point(r);
        }
        let scale = BigInt::one() << bits as usize;
        let k = self.mul_rational(&BigRational::from_integer(scale.clone())).floor();
        RationalInterval::new(BigRational::new(k.clone(), scale.clone()), BigRational::new(k + 1, scale))
            .expect("ordered endpoints")
    }

    /// Decimal expansion rounded to nearest with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        // Halves round away from zero.
        let k = self.abs().mul_rational(&BigRational::from_integer(scale.clone())).add_rational(&half).floor();
        let k = if self.is_negative() { -k } else { k };
        format_scaled(&k, digits)
    }
}

fn format_scaled(k: &BigInt, digits: u32) -> String {
    let neg = k.is_negative();
    let mag = k.magnitude().to_string();
    let digits = digits as usize;
    let padded = if mag.len() <= digits {
        let mut s = "0".repeat(digits + 1 - mag.len());
        s.push_str(&mag);
        s
    } else {
        mag
    };
    let (int, frac) = padded.split_at(padded.len() - digits);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(int);
    if digits > 0 {
        out.push('.');
        out.push_str(frac);
    }
    out
}

/// Decimal expansion of a rational rounded to nearest.
pub fn rational_to_decimal(r: &BigRational, digits: u32) -> String {
    QuadraticSurd::from_rational(r.clone()).to_decimal(digits)
}

fn strip_squares(mut d: BigUint) -> (BigUint, BigUint) {
    let mut square = BigUint::one();
    let mut p = 2u64;
    while p < SQUARE_STRIP_LIMIT {
        let pp = BigUint::from(p * p);
        if pp > d {
            break;
        }
        while (&d % &pp).is_zero() {
            d /= &pp;
            square *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (square, d)
}

fn ordering(s: i8) -> Ordering {
    s.cmp(&0)
}

fn rsign(r: &BigRational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `a + b·√d` with `d` not a perfect square (or zero).
fn sign_single(a: &BigRational, b: &BigRational, d: &BigUint) -> i8 {
    let sb = if d.is_zero() { 0 } else { rsign(b) };
    let sa = rsign(a);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let dr = BigRational::from_integer(BigInt::from(d.clone()));
    match (a * a).cmp(&(b * b * dr)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of `r + b·√m + c·√n` for arbitrary radicands.
fn sign_double(r: &BigRational, b: &BigRational, m: &BigUint, c: &BigRational, n: &BigUint) -> i8 {
    let sx = sign_single(r, b, m);
    let sy = if n.is_zero() { 0 } else { rsign(c) };
    if sy == 0 {
        return sx;
    }
    if sx == 0 || sx == sy {
        return if sx == 0 { sy } else { sx };
    }
    // Opposite signs: compare (r + b√m)² with c²·n.
    let mr = BigRational::from_integer(BigInt::from(m.clone()));
    let nr = BigRational::from_integer(BigInt::from(n.clone()));
    let two = BigRational::from_integer(BigInt::from(2));
    let rat = r * r + b * b * mr - c * c * nr;
    let irr = two * r * b;
    match sign_single(&rat, &irr, m) {
        1 => sx,
        -1 => sy,
        _ => 0,
    }
}

impl PartialEq for QuadraticSurd {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QuadraticSurd {}

impl PartialOrd for QuadraticSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        let r = &self.rational - &other.rational;
        if let Ok((d, b1, b2)) = self.aligned(other) {
            return ordering(sign_single(&r, &(b1 - b2), &d));
        }
        ordering(sign_double(&r, &self.coeff, &self.radicand, &(-&other.coeff), &other.radicand))
    }
}

impl From<BigRational> for QuadraticSurd {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl From<BigInt> for QuadraticSurd {
    fn from(i: BigInt) -> Self {
        Self::from_integer(i)
    }
}

impl From<i64> for QuadraticSurd {
    fn from(i: i64) -> Self {
        Self::from_integer(i)
    }
}

impl Neg for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        QuadraticSurd::raw(-&self.rational, -&self.coeff, self.radicand.clone())
    }
}

impl Neg for QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        -&self
    }
}

macro_rules! field_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadraticSurd> for &QuadraticSurd {
            type Output = QuadraticSurd;
            /// Panics when the operands live in different quadratic fields
            /// (or on division by zero); use the `checked_*` form otherwise.
            fn $method(self, rhs: &QuadraticSurd) -> QuadraticSurd {
                self.$checked(rhs).expect(concat!("QuadraticSurd::", stringify!($method)))
            }
        }
        impl $trait<QuadraticSurd> for QuadraticSurd {
            type Output = QuadraticSurd;
            fn $method(self, rhs: QuadraticSurd) -> QuadraticSurd {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadraticSurd> for QuadraticSurd {
            type Output = QuadraticSurd;
            fn $method(self, rhs: &QuadraticSurd) -> QuadraticSurd {
                (&self).$method(rhs)
            }
        }
    };
}

field_op!(Add, add, checked_add);
field_op!(Sub, sub, checked_sub);
field_op!(Mul, mul, checked_mul);
field_op!(Div, div, checked_div);

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return f.write_str(&format_ratio(&r));
        }
        let (p, d, q) = self.to_pdq();
        write!(f, "surd:{p},{d},{q}")
    }
}

/// `num/den` (or just `num` for integers).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_err(input: &str, position: usize, message: &str) -> Error {
    Error::Parse { input: input.to_string(), position, message: message.to_string() }
}

fn parse_int(input: &str, text: &str, offset: usize) -> Result<BigInt> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    if t.is_empty() {
        return Err(parse_err(input, offset + lead, "expected an integer"));
    }
    for (i, ch) in t.char_indices() {
        let ok = ch.is_ascii_digit() || (i == 0 && (ch == '-' || ch == '+'));
        if !ok {
            return Err(parse_err(input, offset + lead + i, "unexpected character in integer"));
        }
    }
    t.parse::<BigInt>().map_err(|_| parse_err(input, offset + lead, "malformed integer"))
}

/// Parses `num/den`, an integer, or a decimal literal such as `5.2` or
/// `1e-9` into the exact rational it denotes.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    if let Some(slash) = input.find('/') {
        let n = parse_int(input, &input[..slash], 0)?;
        let d = parse_int(input, &input[slash + 1..], slash + 1)?;
        if d.is_zero() {
            return Err(parse_err(input, slash + 1, "zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(input)
}

fn parse_decimal(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let lead = input.len() - input.trim_start().len();
    if s.is_empty() {
        return Err(parse_err(input, 0, "empty number"));
    }
    let (mantissa, exponent, exp_pos) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..]), i + 1),
        None => (s, None, 0),
    };
    let (neg, body, body_off) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..], 1),
        Some(b'+') => (false, &mantissa[1..], 1),
        _ => (false, mantissa, 0),
    };
    let mut digits = String::new();
    let mut frac_len: i64 = 0;
    let mut seen_dot = false;
    for (i, ch) in body.char_indices() {
        match ch {
            '0'..='9' => {
                digits.push(ch);
                if seen_dot {
                    frac_len += 1;
                }
            }
            '.' if !seen_dot => seen_dot = true,
            _ => return Err(parse_err(input, lead + body_off + i, "unexpected character in number")),
        }
    }
    if digits.is_empty() {
        return Err(parse_err(input, lead + body_off, "expected digits"));
    }
    let mut exp: i64 = 0;
    if let Some(e) = exponent {
        exp = e.parse::<i64>().map_err(|_| parse_err(input, lead + exp_pos, "malformed exponent"))?;
    }
    let mut n: BigInt = digits.parse().expect("ascii digits");
    if neg {
        n = -n;
    }
    let shift = exp - frac_len;
    let ten = BigInt::from(10u32);
    let r = if shift >= 0 {
        BigRational::from_integer(n * ten.pow(shift as u64))
    } else {
        BigRational::new(n, ten.pow((-shift) as u64))
    };
    Ok(r)
}

/// Parses an exact value: a decimal literal, `num/den`, or a surd triple
/// `surd:P,D,Q` meaning `(P + √D)/Q`.
pub fn parse_exact(input: &str) -> Result<QuadraticSurd> {
    let t = input.trim();
    if let Some(rest) = t.strip_prefix("surd:") {
        let base = input.len() - rest.len();
        let parts: alloc::vec::Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(parse_err(input, base, "surd triple needs exactly three fields P,D,Q"));
        }
        let mut offs = base;
        let p = parse_int(input, parts[0], offs)?;
        offs += parts[0].len() + 1;
        let d = parse_int(input, parts[1], offs)?;
        let d = d.to_biguint().ok_or_else(|| parse_err(input, offs, "radicand must be non-negative"))?;
        offs += parts[1].len() + 1;
        let q = parse_int(input, parts[2], offs)?;
        if q.is_zero() {
            return Err(parse_err(input, offs, "zero denominator"));
        }
        return QuadraticSurd::new(p, d, q);
    }
    parse_rational(input).map(QuadraticSurd::from_rational)
}
