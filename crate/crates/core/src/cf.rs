//! Continued-fraction arithmetic: convergents, complete quotients, the
//! two-sided quantities `λ_n = α*_{n-1} + α_n` and Perron residuals.
//!
//! Digits are indexed from 1 as in `[a_0; a_1, a_2, …]`; `digits[i - 1]` is
//! `a_i`. Anything depending on the unknown tail comes back as an
//! [`Enclosure`]: exact for periodic or terminated tails, a rational interval
//! for tails known only to lie in a [`DigitSystem`].

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::digits::DigitSystem;
use crate::error::{Error, Result};
use crate::interval::{Enclosure, RationalInterval};
use crate::surd::QuadraticSurd;

/// Grid used when an exact irrational `λ_n` has to be reported as a
/// rational interval.
pub const REPORT_BITS: u32 = 256;

/// What is known about the partial quotients after the explicit digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Unknown, but every further digit and transition obeys the system.
    System(DigitSystem),
    /// The given block repeats forever.
    Periodic(Vec<u64>),
    /// The expansion stops; the value is rational.
    Terminated,
    /// Nothing is known about the remaining digits.
    Unbounded,
}

/// `[a_0; a_1, …, a_N]` followed by a [`Tail`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub a0: BigInt,
    pub digits: Vec<u64>,
    pub tail: Tail,
}

impl CfExpansion {
    pub fn new(a0: impl Into<BigInt>, digits: Vec<u64>, tail: Tail) -> Result<Self> {
        if let Some(position) = digits.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDigit { position: position + 1, digit: 0 });
        }
        if let Tail::Periodic(period) = &tail {
            if period.is_empty() {
                return Err(Error::EmptyPeriod);
            }
            if let Some(position) = period.iter().position(|&d| d == 0) {
                return Err(Error::InvalidDigit { position: digits.len() + position + 1, digit: 0 });
            }
        }
        Ok(CfExpansion { a0: a0.into(), digits, tail })
    }

    /// `[0; period, period, …]`.
    pub fn purely_periodic(period: Vec<u64>) -> Result<Self> {
        Self::new(0, Vec::new(), Tail::Periodic(period))
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `a_i` for `1 ≤ i ≤ N`, continuing into a periodic tail.
    pub fn digit(&self, i: usize) -> Option<u64> {
        if i == 0 {
            return None;
        }
        if i <= self.digits.len() {
            return Some(self.digits[i - 1]);
        }
        match &self.tail {
            Tail::Periodic(p) => Some(p[(i - 1 - self.digits.len()) % p.len()]),
            _ => None,
        }
    }

    /// Copy whose explicit digits are extended through index `n` by
    /// unrolling a periodic tail.
    pub fn unrolled(&self, n: usize) -> CfExpansion {
        let mut out = self.clone();
        if let Tail::Periodic(p) = &self.tail {
            let start = self.digits.len();
            if n > start {
                let mut rotated = p.clone();
                rotated.rotate_left((n - start) % p.len());
                out.digits.extend((start..n).map(|i| p[(i - start) % p.len()]));
                out.tail = Tail::Periodic(rotated);
            }
        }
        out
    }

    fn require(&self, needed: usize) -> Result<()> {
        if needed > self.digits.len() {
            Err(Error::InsufficientDigits { needed, available: self.digits.len() })
        } else {
            Ok(())
        }
    }
}

/// The Möbius map `t ↦ (p + t·p') / (q + t·q')` of a prefix `[lead; d_1..d_j]`
/// where `p/q` and `p'/q'` are its last two convergents. For `t = [0; rest]`
/// it evaluates `[lead; d_1, …, d_j, rest]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub p: BigInt,
    pub p_prev: BigInt,
    pub q: BigInt,
    pub q_prev: BigInt,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius { p: BigInt::zero(), p_prev: BigInt::one(), q: BigInt::one(), q_prev: BigInt::zero() }
    }

    pub fn from_digits(lead: &BigInt, digits: &[u64]) -> Self {
        let mut m = Mobius { p: lead.clone(), p_prev: BigInt::one(), q: BigInt::one(), q_prev: BigInt::zero() };
        for &d in digits {
            m.push(d);
        }
        m
    }

    /// Appends one partial quotient.
    pub fn push(&mut self, d: u64) {
        let d = BigInt::from(d);
        let p = &d * &self.p + &self.p_prev;
        let q = &d * &self.q + &self.q_prev;
        self.p_prev = core::mem::replace(&mut self.p, p);
        self.q_prev = core::mem::replace(&mut self.q, q);
    }

    pub fn apply_rational(&self, t: &BigRational) -> BigRational {
        let (a, b) = (t.numer(), t.denom());
        let num = &self.p * b + a * &self.p_prev;
        let den = &self.q * b + a * &self.q_prev;
        BigRational::new(num, den)
    }

    /// Image of `[lo, hi] ⊂ [0, ∞)`; the map is monotone there.
    pub fn apply_interval(&self, t: &RationalInterval) -> RationalInterval {
        RationalInterval::hull_of(self.apply_rational(t.lo()), self.apply_rational(t.hi()))
    }

    pub fn apply_surd(&self, t: &QuadraticSurd) -> QuadraticSurd {
        let num = t
            .mul_rational(&BigRational::from_integer(self.p_prev.clone()))
            .add_rational(&BigRational::from_integer(self.p.clone()));
        let den = t
            .mul_rational(&BigRational::from_integer(self.q_prev.clone()))
            .add_rational(&BigRational::from_integer(self.q.clone()));
        &num / &den
    }

    pub fn apply(&self, t: &Enclosure) -> Enclosure {
        match t {
            Enclosure::Exact(s) => Enclosure::Exact(self.apply_surd(s)),
            Enclosure::Range(iv) => Enclosure::Range(self.apply_interval(iv)),
        }
    }
}

/// Convergent numerators and denominators `p_i, q_i` for `-1 ≤ i ≤ N`.
#[derive(Clone, Debug)]
pub struct ConvergentTable {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    pub fn new(a0: &BigInt, digits: &[u64]) -> Self {
        let mut p = Vec::with_capacity(digits.len() + 2);
        let mut q = Vec::with_capacity(digits.len() + 2);
        p.push(BigInt::one());
        q.push(BigInt::zero());
        p.push(a0.clone());
        q.push(BigInt::one());
        let mut t = ConvergentTable { p, q };
        for &d in digits {
            t.push(d);
        }
        t
    }

    pub fn for_cf(cf: &CfExpansion) -> Self {
        Self::new(&cf.a0, &cf.digits)
    }

    pub fn push(&mut self, d: u64) {
        let n = self.p.len();
        let d = BigInt::from(d);
        let p = &d * &self.p[n - 1] + &self.p[n - 2];
        let q = &d * &self.q[n - 1] + &self.q[n - 2];
        self.p.push(p);
        self.q.push(q);
    }

    /// Highest index `N` available.
    pub fn len(&self) -> usize {
        self.p.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `p_i` for `i ≥ -1`.
    pub fn p(&self, i: isize) -> &BigInt {
        &self.p[(i + 1) as usize]
    }

    /// `q_i` for `i ≥ -1`.
    pub fn q(&self, i: isize) -> &BigInt {
        &self.q[(i + 1) as usize]
    }

    /// `α*_n = q_{n-1}/q_n = [0; a_n, …, a_1]`; zero for `n = 0`.
    pub fn alpha_star(&self, n: usize) -> BigRational {
        let n = n as isize;
        BigRational::new(self.q(n - 1).clone(), self.q(n).clone())
    }

    pub fn mobius(&self, n: usize) -> Mobius {
        let n = n as isize;
        Mobius {
            p: self.p(n).clone(),
            p_prev: self.p(n - 1).clone(),
            q: self.q(n).clone(),
            q_prev: self.q(n - 1).clone(),
        }
    }
}

/// `(p_i, q_i)` for `1 ≤ i ≤ n`.
pub fn convergents(cf: &CfExpansion, n: usize) -> Result<Vec<(BigInt, BigInt)>> {
    cf.require(n)?;
    let t = ConvergentTable::new(&cf.a0, &cf.digits[..n]);
    Ok((1..=n as isize).map(|i| (t.p(i).clone(), t.q(i).clone())).collect())
}

/// `[a0; pre, period, period, …]` as an exact quadratic surd.
pub fn periodic_value(a0: &BigInt, pre: &[u64], period: &[u64]) -> QuadraticSurd {
    assert!(!period.is_empty(), "empty period");
    // y = [period_1; period_2, …, period_L, y] solves
    // q_{L-1} y² + (q_{L-2} − p_{L-1}) y − p_{L-2} = 0 with y > 1.
    let m = Mobius::from_digits(&BigInt::from(period[0]), &period[1..]);
    let a = &m.q;
    let b = &m.q_prev - &m.p;
    let c = -&m.p_prev;
    let disc = &b * &b - BigInt::from(4) * a * &c;
    let y = QuadraticSurd::new(-b, disc.to_biguint().expect("positive discriminant"), BigInt::from(2) * a)
        .expect("nonzero leading coefficient");
    let t = y.recip().expect("y > 1");
    Mobius::from_digits(a0, pre).apply_surd(&t)
}

/// Exact value of an expansion with a periodic tail.
pub fn surd_from_periodic(cf: &CfExpansion) -> Result<QuadraticSurd> {
    match &cf.tail {
        Tail::Periodic(p) => Ok(periodic_value(&cf.a0, &cf.digits, p)),
        _ => Err(Error::CannotEnclose { index: cf.digits.len() }),
    }
}

/// `α*_n = q_{n-1}/q_n = [0; a_n, …, a_1]` for `n ≥ 1`.
pub fn alpha_star(cf: &CfExpansion, n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InsufficientDigits { needed: 1, available: 0 });
    }
    cf.require(n)?;
    Ok(ConvergentTable::new(&BigInt::zero(), &cf.digits[..n]).alpha_star(n))
}

/// Enclosure of `[0; a_{from+1}, a_{from+2}, …]` using at most `lookahead`
/// explicit digits before falling back to the tail description.
pub fn tail_value(cf: &CfExpansion, from: usize, lookahead: usize) -> Result<Enclosure> {
    let n = cf.digits.len();
    cf.require(from)?;
    let end = from.saturating_add(lookahead).min(n);
    let known = &cf.digits[from..end];
    let residual = if end == n {
        match &cf.tail {
            Tail::System(sys) => {
                let prev = if n == 0 { None } else { Some(cf.digits[n - 1]) };
                Enclosure::Range(sys.tail_enclosure(prev).clone())
            }
            Tail::Periodic(p) => Enclosure::Exact(periodic_value(&BigInt::zero(), &[], p)),
            Tail::Terminated => Enclosure::Exact(QuadraticSurd::zero()),
            Tail::Unbounded => return Err(Error::CannotEnclose { index: from }),
        }
    } else {
        // Truncated: the skipped digits plus the tail stay inside the system
        // enclosure when they obey it; otherwise all we know is [0, 1].
        let prev = if end == 0 { None } else { Some(cf.digits[end - 1]) };
        match &cf.tail {
            Tail::System(sys) if sys.validate(&cf.digits[end..], prev).is_ok() => {
                Enclosure::Range(sys.tail_enclosure(prev).clone())
            }
            _ => Enclosure::Range(RationalInterval::new(BigRational::zero(), BigRational::one()).expect("ordered")),
        }
    };
    Ok(Mobius::from_digits(&BigInt::zero(), known).apply(&residual))
}

/// The complete quotient `α_n = [a_n; a_{n+1}, …]` for `n ≥ 1`.
pub fn complete_quotient(cf: &CfExpansion, n: usize, lookahead: usize) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::InsufficientDigits { needed: 1, available: cf.digits.len() });
    }
    cf.require(n)?;
    let t = tail_value(cf, n, lookahead)?;
    Ok(t.add_rational(&BigRational::from_integer(BigInt::from(cf.digits[n - 1]))))
}

/// The value of the whole expansion.
pub fn value(cf: &CfExpansion, lookahead: usize) -> Result<Enclosure> {
    let t = tail_value(cf, 0, lookahead)?;
    Ok(t.add_rational(&BigRational::from_integer(cf.a0.clone())))
}

/// `λ_n` with a precomputed `α*_{n-1}` and bounded lookahead.
pub fn lambda_with(cf: &CfExpansion, n: usize, alpha_star_prev: &BigRational, lookahead: usize) -> Result<Enclosure> {
    Ok(complete_quotient(cf, n, lookahead)?.add_rational(alpha_star_prev))
}

/// `λ_n = [a_n; a_{n+1}, …] + [0; a_{n-1}, …, a_1]` using every known digit.
pub fn lambda_enclosure(cf: &CfExpansion, n: usize) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::InsufficientDigits { needed: 1, available: cf.digits.len() });
    }
    cf.require(n)?;
    let star = ConvergentTable::new(&BigInt::zero(), &cf.digits[..n - 1]).alpha_star(n - 1);
    lambda_with(cf, n, &star, usize::MAX)
}

/// Rational enclosure of `λ_n`; exact irrational values are reported on a
/// `2^-256` grid.
pub fn lambda_n(cf: &CfExpansion, n: usize) -> Result<RationalInterval> {
    Ok(lambda_enclosure(cf, n)?.to_interval(REPORT_BITS))
}

/// Enclosure of `|α − p_n/q_n| · λ_{n+1} · q_n²`, which Perron's formula
/// says is exactly 1.
///
/// Both factors depend on the tail only through the complete quotient
/// `u = α_{n+1}`, and the product is a Möbius function of `u`, hence
/// monotone on `u > 0`. Evaluating it exactly at the endpoints of the
/// enclosure of `u` therefore gives a sound enclosure.
pub fn perron_residual(cf: &CfExpansion, n: usize) -> Result<RationalInterval> {
    cf.require(n + 1)?;
    let table = ConvergentTable::new(&cf.a0, &cf.digits[..n]);
    let m = table.mobius(n);
    let pq = BigRational::new(m.p.clone(), m.q.clone());
    let star = BigRational::new(m.q_prev.clone(), m.q.clone());
    let q2 = BigRational::from_integer(&m.q * &m.q);
    let u = complete_quotient(cf, n + 1, usize::MAX)?;
    // x(u) = (p_n·u + p_{n-1}) / (q_n·u + q_{n-1})
    let at = |u: &QuadraticSurd| -> QuadraticSurd {
        let num = u
            .mul_rational(&BigRational::from_integer(m.p.clone()))
            .add_rational(&BigRational::from_integer(m.p_prev.clone()));
        let den = u
            .mul_rational(&BigRational::from_integer(m.q.clone()))
            .add_rational(&BigRational::from_integer(m.q_prev.clone()));
        let x = &num / &den;
        let diff = x.add_rational(&-&pq).abs();
        (&diff * &u.add_rational(&star)).mul_rational(&q2)
    };
    Ok(match u {
        Enclosure::Exact(s) => at(&s).enclose(REPORT_BITS),
        Enclosure::Range(iv) => {
            let lo = at(&QuadraticSurd::from_rational(iv.lo().clone()));
            let hi = at(&QuadraticSurd::from_rational(iv.hi().clone()));
            let lo = lo.to_rational().expect("rational at rational u");
            let hi = hi.to_rational().expect("rational at rational u");
            RationalInterval::hull_of(lo, hi)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn finite(digits: Vec<u64>) -> CfExpansion {
        CfExpansion::new(0, digits, Tail::Terminated).unwrap()
    }

    /// Direct nested-fraction evaluation, independent of the recurrence.
    fn nested(digits: &[u64]) -> BigRational {
        let mut acc = BigRational::zero();
        for &d in digits.iter().rev() {
            acc = (BigRational::from_integer(BigInt::from(d)) + acc).recip();
        }
        acc
    }

    #[test]
    fn fibonacci_denominators() {
        let q: Vec<BigInt> = convergents(&finite(vec![1; 5]), 5).unwrap().into_iter().map(|c| c.1).collect();
        assert_eq!(q, [1, 2, 3, 5, 8].map(BigInt::from).to_vec());
    }

    #[test]
    fn single_digit_convergent() {
        let c = convergents(&finite(vec![4]), 1).unwrap();
        assert_eq!(c, vec![(BigInt::from(1), BigInt::from(4))]);
    }

    #[test]
    fn convergent_matches_nested_evaluation() {
        let c = convergents(&finite(vec![3, 1, 3]), 3).unwrap();
        let (p, q) = c[2].clone();
        assert_eq!(BigRational::new(p, q), nested(&[3, 1, 3]));
        assert_eq!(nested(&[3, 1, 3]), r(4, 15));
    }

    #[test]
    fn insufficient_digits_names_shortfall() {
        let err = convergents(&finite(vec![1, 2]), 5).unwrap_err();
        assert_eq!(err, Error::InsufficientDigits { needed: 5, available: 2 });
        assert!(alloc::format!("{err}").contains("short by 3"));
    }

    #[test]
    fn periodic_surds() {
        let golden = surd_from_periodic(&CfExpansion::purely_periodic(vec![1]).unwrap()).unwrap();
        assert_eq!(golden, QuadraticSurd::new(-1, 5u32, 2).unwrap());
        let x = surd_from_periodic(&CfExpansion::purely_periodic(vec![1, 3]).unwrap()).unwrap();
        assert_eq!(x, QuadraticSurd::new(-3, 21u32, 2).unwrap());
        // t² + 3t − 3 = 0
        let lhs = &(&x * &x) + &x.mul_rational(&r(3, 1));
        assert_eq!(lhs, QuadraticSurd::from(3));
        let y = surd_from_periodic(&CfExpansion::purely_periodic(vec![4, 1]).unwrap()).unwrap();
        assert_eq!(y, QuadraticSurd::new(-1, 2u32, 2).unwrap());
        let quad = (&y * &y).mul_rational(&r(4, 1)) + y.mul_rational(&r(4, 1));
        assert_eq!(quad, QuadraticSurd::one());
    }

    #[test]
    fn periodic_value_fixed_point() {
        // Substituting x into the Möbius map of one period returns x.
        let period = [2u64, 1, 3];
        let x = periodic_value(&BigInt::zero(), &[], &period);
        let back = Mobius::from_digits(&BigInt::zero(), &period).apply_surd(&x);
        assert_eq!(back, x);
    }

    #[test]
    fn alpha_star_examples() {
        assert_eq!(alpha_star(&finite(vec![1, 1, 1]), 3).unwrap(), r(2, 3));
        assert_eq!(alpha_star(&finite(vec![3, 1, 3]), 3).unwrap(), nested(&[3, 1, 3]));
        assert_eq!(alpha_star(&finite(vec![7, 2]), 1).unwrap(), r(1, 7));
    }

    #[test]
    fn lambda_of_golden_ratio_tends_to_root5() {
        let cf = CfExpansion::purely_periodic(vec![1]).unwrap().unrolled(30);
        let l = lambda_enclosure(&cf, 30).unwrap();
        let exact = l.exact().unwrap().clone();
        let gap = (QuadraticSurd::sqrt(5u32) - exact).abs();
        assert!(!gap.is_rational());
        assert!(gap < QuadraticSurd::from_rational(r(1, 1_000_000_000)));
    }

    #[test]
    fn lambda_with_digit_bounded_tail() {
        let f4 = DigitSystem::bounded(4).unwrap();
        let cf = CfExpansion::new(0, vec![2, 3, 1], Tail::System(f4)).unwrap();
        let l = lambda_n(&cf, 3).unwrap();
        assert!(l.lo() > &r(1, 1) && l.hi() < &r(6, 1));
    }

    #[test]
    fn unbounded_tail_cannot_be_enclosed() {
        let cf = CfExpansion::new(0, vec![2, 3], Tail::Unbounded).unwrap();
        assert_eq!(lambda_n(&cf, 2), Err(Error::CannotEnclose { index: 2 }));
    }

    #[test]
    fn perron_residual_golden() {
        let cf = CfExpansion::purely_periodic(vec![1]).unwrap().unrolled(30);
        let res = perron_residual(&cf, 4).unwrap();
        assert!(res.contains(&r(1, 1)));
        assert!(res.width() < r(1, 1000));
        // Same with the tail only digit-bounded.
        let f4 = DigitSystem::bounded(4).unwrap();
        let cf = CfExpansion::new(0, vec![1; 30], Tail::System(f4)).unwrap();
        let res = perron_residual(&cf, 4).unwrap();
        assert!(res.contains(&r(1, 1)));
        assert!(res.width() < r(1, 1000));
    }

    #[test]
    fn perron_residual_with_surd_tail() {
        let cf = CfExpansion::new(0, vec![2], Tail::Periodic(vec![1, 2])).unwrap().unrolled(6);
        assert!(perron_residual(&cf, 3).unwrap().contains(&r(1, 1)));
    }

    #[test]
    fn rejects_zero_digits() {
        assert!(CfExpansion::new(0, vec![1, 0], Tail::Terminated).is_err());
        assert!(CfExpansion::new(0, vec![], Tail::Periodic(vec![])).is_err());
    }
}
