//! Independent checks on a continued fraction `α`: brute-force solutions of
//! `|α − p/q| < (1/(γq²))·(1 ± ϖ(q)/q²)`, the same verdict at convergents
//! through Perron's formula, Lagrange-constant estimates and certificate
//! re-checking.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cf::{lambda_enclosure, value, CfExpansion, ConvergentTable, Tail};
use crate::construct::{strengthened_threshold, Certificate};
use crate::error::{Error, Result};
use crate::interval::{Enclosure, RationalInterval};
use crate::pad::PadFunction;
use crate::surd::QuadraticSurd;

/// Extra refinements tried for an exact `α` before giving up on a verdict.
const REFINE_ROUNDS: u32 = 4;

/// Which member of the inequality family is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `(1 + ϖ(q)/q²)`, the weakened inequality.
    Plus,
    /// `(1 − ϖ(q)/q²)`, the strengthened inequality.
    Minus,
    /// The plain inequality `|α − p/q| < 1/(γq²)`.
    None,
}

impl Sign {
    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
            Sign::None => "none",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            "none" | "plain" => Ok(Sign::None),
            _ => Err(Error::InvalidParams(format!("unknown sign {s:?}; expected plus, minus or none"))),
        }
    }

    /// `1 ± ϖ(q)/q²`, or 1.
    pub fn factor(self, pad: &PadFunction, q: &BigInt) -> Result<BigRational> {
        let one = BigRational::one();
        if self == Sign::None {
            return Ok(one);
        }
        let s = pad.eval(q)? / BigRational::from_integer(q * q);
        Ok(if self == Sign::Plus { one + s } else { one - s })
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    True,
    False,
    Undecided,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::True => "true",
            Decision::False => "false",
            Decision::Undecided => "undecided",
        }
    }
}

/// One tested fraction with enclosures of both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub p: BigInt,
    pub q: BigInt,
    /// `|α − p/q|`.
    pub lhs: RationalInterval,
    /// `(1/(γq²))·factor`.
    pub rhs: RationalInterval,
}

impl Solution {
    /// `rhs − lhs`; strictly positive for a certified solution.
    pub fn margin(&self) -> RationalInterval {
        RationalInterval::new(self.rhs.lo() - self.lhs.hi(), self.rhs.hi() - self.lhs.lo()).expect("ordered")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionReport {
    pub gamma: QuadraticSurd,
    pub pad: PadFunction,
    pub sign: Sign,
    pub bound: u64,
    /// Certified solutions in increasing `q`, then `p`.
    pub solutions: Vec<Solution>,
    /// Fractions whose verdict the enclosure of `α` could not settle.
    pub undecided: Vec<Solution>,
}

impl SolutionReport {
    pub fn denominators(&self) -> Vec<BigInt> {
        self.solutions.iter().map(|s| s.q.clone()).collect()
    }

    /// Concatenates reports over consecutive `q` ranges.
    pub fn merge(parts: Vec<SolutionReport>) -> Option<SolutionReport> {
        let mut it = parts.into_iter();
        let mut out = it.next()?;
        for p in it {
            out.bound = out.bound.max(p.bound);
            out.solutions.extend(p.solutions);
            out.undecided.extend(p.undecided);
        }
        out.solutions.sort_by(|a, b| (&a.q, &a.p).cmp(&(&b.q, &b.p)));
        out.undecided.sort_by(|a, b| (&a.q, &a.p).cmp(&(&b.q, &b.p)));
        Some(out)
    }
}

/// Shared, immutable data for scanning denominators; safe to use from
/// several threads.
#[derive(Clone, Debug)]
pub struct Enumerator {
    alpha: Enclosure,
    alpha_iv: RationalInterval,
    gamma: QuadraticSurd,
    gamma_iv: RationalInterval,
    bits: u32,
    pad: PadFunction,
    sign: Sign,
}

fn outward(iv: &RationalInterval, bits: u32) -> RationalInterval {
    let scale = BigInt::one() << bits as usize;
    let s = BigRational::from_integer(scale.clone());
    let lo = (iv.lo() * &s).floor().to_integer();
    let hi = (iv.hi() * &s).ceil().to_integer();
    RationalInterval::new(BigRational::new(lo, scale.clone()), BigRational::new(hi, scale)).expect("ordered")
}

impl Enumerator {
    /// Prepares enclosures good enough for denominators up to `bound`.
    pub fn new(alpha: &CfExpansion, gamma: &QuadraticSurd, pad: &PadFunction, sign: Sign, bound: u64) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Error::InvalidParams("gamma must be positive".into()));
        }
        let alpha = value(alpha, usize::MAX)?;
        let bits = 96 + 8 * (64 - bound.max(1).leading_zeros());
        let alpha_iv = match &alpha {
            Enclosure::Exact(s) => s.enclose(bits),
            Enclosure::Range(iv) => outward(iv, bits),
        };
        Ok(Enumerator {
            alpha,
            alpha_iv,
            gamma: gamma.clone(),
            gamma_iv: gamma.enclose(bits),
            bits,
            pad: pad.clone(),
            sign,
        })
    }

    fn sides(
        &self,
        p: &BigInt,
        q: &BigInt,
        f: &BigRational,
        a: &RationalInterval,
        g: &RationalInterval,
    ) -> (RationalInterval, RationalInterval) {
        let x = BigRational::new(p.clone(), q.clone());
        let lhs = a.add_scalar(&-x).abs();
        let r = f / BigRational::from_integer(q * q);
        let rhs = RationalInterval::new(&r / g.hi(), &r / g.lo()).expect("ordered");
        (lhs, rhs)
    }

    /// Decides the inequality at `p/q`.
    pub fn test(&self, p: &BigInt, q: &BigInt) -> Result<(Decision, Solution)> {
        let f = self.sign.factor(&self.pad, q)?;
        if !f.is_positive() {
            let zero = RationalInterval::point(BigRational::zero());
            let (lhs, _) = self.sides(p, q, &BigRational::one(), &self.alpha_iv, &self.gamma_iv);
            return Ok((Decision::False, Solution { p: p.clone(), q: q.clone(), lhs, rhs: zero }));
        }
        let mut a = self.alpha_iv.clone();
        let mut g = self.gamma_iv.clone();
        let mut bits = self.bits;
        for round in 0..=REFINE_ROUNDS {
            let (lhs, rhs) = self.sides(p, q, &f, &a, &g);
            let sol = Solution { p: p.clone(), q: q.clone(), lhs, rhs };
            if sol.lhs.hi() < sol.rhs.lo() {
                return Ok((Decision::True, sol));
            }
            if sol.lhs.lo() >= sol.rhs.hi() {
                return Ok((Decision::False, sol));
            }
            let Enclosure::Exact(alpha) = &self.alpha else {
                return Ok((Decision::Undecided, sol));
            };
            if round == REFINE_ROUNDS {
                // Exact comparison of γ·|α − p/q| with the rational factor.
                let d = alpha.add_rational(&-BigRational::new(p.clone(), q.clone())).abs();
                let r = &f / BigRational::from_integer(q * q);
                let verdict = match d.checked_mul(&self.gamma) {
                    Ok(lhs) => match lhs.cmp_rational(&r) {
                        Ordering::Less => Decision::True,
                        _ => Decision::False,
                    },
                    Err(_) => Decision::Undecided,
                };
                return Ok((verdict, sol));
            }
            bits *= 2;
            a = alpha.enclose(bits);
            g = self.gamma.enclose(bits);
        }
        unreachable!()
    }

    /// All reduced `p/q` with `q_lo ≤ q ≤ q_hi` satisfying the inequality.
    pub fn scan(&self, q_lo: u64, q_hi: u64) -> Result<SolutionReport> {
        let mut report = SolutionReport {
            gamma: self.gamma.clone(),
            pad: self.pad.clone(),
            sign: self.sign,
            bound: q_hi,
            solutions: Vec::new(),
            undecided: Vec::new(),
        };
        for qq in q_lo.max(1)..=q_hi {
            let q = BigInt::from(qq);
            let qr = BigRational::from_integer(q.clone());
            let lo: BigInt = (self.alpha_iv.lo() * &qr).floor().to_integer() - 1;
            let hi: BigInt = (self.alpha_iv.hi() * &qr).ceil().to_integer() + 1;
            let mut p = lo;
            while p <= hi {
                if p.gcd(&q).is_one() {
                    let (d, sol) = self.test(&p, &q)?;
                    match d {
                        Decision::True => report.solutions.push(sol),
                        Decision::Undecided => report.undecided.push(sol),
                        Decision::False => {}
                    }
                }
                p += 1;
            }
        }
        Ok(report)
    }
}

/// Every reduced solution with `1 ≤ q ≤ bound`, in increasing `q`.
pub fn enumerate_solutions(
    alpha: &CfExpansion,
    gamma: &QuadraticSurd,
    pad: &PadFunction,
    sign: Sign,
    bound: u64,
) -> Result<SolutionReport> {
    Enumerator::new(alpha, gamma, pad, sign, bound)?.scan(1, bound)
}

/// Expansion whose explicit digits reach index `n`, unrolling a periodic
/// tail when needed.
fn with_digits(alpha: &CfExpansion, n: usize) -> Result<CfExpansion> {
    if alpha.digits.len() >= n {
        return Ok(alpha.clone());
    }
    match alpha.tail {
        Tail::Periodic(_) => Ok(alpha.unrolled(n)),
        _ => Err(Error::InsufficientDigits { needed: n, available: alpha.digits.len() }),
    }
}

/// The inequality at the convergent `p_n/q_n`, decided through
/// `|α − p_n/q_n| = 1/(λ_{n+1} q_n²)`: it holds iff `λ_{n+1}·factor > γ`.
pub fn convergent_predicate(
    alpha: &CfExpansion,
    gamma: &QuadraticSurd,
    pad: &PadFunction,
    sign: Sign,
    n: usize,
) -> Result<Decision> {
    let cf = with_digits(alpha, n + 1)?;
    let table = ConvergentTable::new(&cf.a0, &cf.digits[..n]);
    let q = table.q(n as isize);
    let f = sign.factor(pad, q)?;
    if !f.is_positive() {
        return Ok(Decision::False);
    }
    let lambda = lambda_enclosure(&cf, n + 1)?;
    let ord = match &lambda {
        Enclosure::Exact(l) => Some(l.mul_rational(&f).cmp(gamma)),
        Enclosure::Range(iv) => iv.scale(&f).cmp_surd(gamma),
    };
    Ok(match ord {
        Some(Ordering::Greater) => Decision::True,
        Some(_) => Decision::False,
        None => Decision::Undecided,
    })
}

/// `(p_n, q_n)` for `0 ≤ n ≤ count`.
pub fn convergent_fractions(alpha: &CfExpansion, count: usize) -> Result<Vec<(BigInt, BigInt)>> {
    let cf = with_digits(alpha, count)?;
    let table = ConvergentTable::new(&cf.a0, &cf.digits[..count]);
    Ok((0..=count as isize).map(|i| (table.p(i).clone(), table.q(i).clone())).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangeEstimate {
    /// Running supremum of the `λ_n` enclosures for `n = 1..=N`, endpoint by
    /// endpoint.
    pub running: Vec<RationalInterval>,
    /// The largest enclosures (by upper end) with their indices.
    pub top: Vec<(usize, RationalInterval)>,
}

/// Running supremum and the `k` largest values of `λ_n`, `n ≤ count`.
pub fn lagrange_estimate(alpha: &CfExpansion, count: usize, k: usize) -> Result<LagrangeEstimate> {
    let cf = with_digits(alpha, count)?;
    let table = ConvergentTable::new(&BigInt::zero(), &cf.digits);
    let mut running: Vec<RationalInterval> = Vec::with_capacity(count);
    let mut all = Vec::with_capacity(count);
    for n in 1..=count {
        let lambda = crate::construct::lambda_for(&cf, &table, n, true)?;
        let next = match running.last() {
            Some(prev) => RationalInterval::new(prev.lo().max(lambda.lo()).clone(), prev.hi().max(lambda.hi()).clone())
                .expect("ordered"),
            None => lambda.clone(),
        };
        running.push(next);
        all.push((n, lambda));
    }
    all.sort_by(|a, b| b.1.hi().cmp(a.1.hi()).then(a.0.cmp(&b.0)));
    all.truncate(k);
    Ok(LagrangeEstimate { running, top: all })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecheckFailure {
    /// Offending index, or `None` for certificate-wide fields.
    pub n: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecheckReport {
    pub checked: usize,
    pub failure: Option<RecheckFailure>,
}

impl RecheckReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Recomputes every `λ_n` of `alpha` and re-validates each certificate
/// entry, the marked indices and `threshold_q`.
pub fn recheck_certificate(cert: &Certificate, alpha: &CfExpansion) -> Result<RecheckReport> {
    let needed = cert.entries.iter().map(|e| e.n).chain(cert.undecided.iter().copied()).max().unwrap_or(0);
    if needed > alpha.digits.len() {
        return Err(Error::InsufficientDigits { needed, available: alpha.digits.len() });
    }
    let fail = |checked, n, detail: String| Ok(RecheckReport { checked, failure: Some(RecheckFailure { n, detail }) });
    if cert.entries.is_empty() && cert.blocks.is_empty() {
        return Ok(RecheckReport { checked: 0, failure: None });
    }
    let table = ConvergentTable::new(&BigInt::zero(), &alpha.digits);
    let lambdas = (1..=alpha.digits.len())
        .map(|n| crate::construct::lambda_for(alpha, &table, n, true))
        .collect::<Result<Vec<_>>>()?;
    let marked_class = cert.marked_class();
    let mut checked = 0;
    for e in &cert.entries {
        let n = e.n;
        if n == 0 {
            return fail(checked, Some(n), "index 0 has no lambda".into());
        }
        if table.q(n as isize) != &e.q_n {
            return fail(
                checked,
                Some(n),
                format!("q_n is {} but the certificate says {}", table.q(n as isize), e.q_n),
            );
        }
        let is_marked = cert.blocks.iter().any(|b| b.k == n);
        if is_marked != (e.class == marked_class) {
            return fail(checked, Some(n), format!("class {} does not match the block layout", e.class));
        }
        let hold = |iv: &RationalInterval| e.class.holds(iv, &e.q_n, &cert.gamma, &cert.pad, &cert.epsilon);
        if !hold(&e.lambda)? {
            return fail(checked, Some(n), format!("certified enclosure does not satisfy {}", e.class));
        }
        let fresh = &lambdas[n - 1];
        if !hold(fresh)? {
            return fail(checked, Some(n), format!("recomputed lambda does not satisfy {}", e.class));
        }
        if fresh.hi() < e.lambda.lo() || fresh.lo() > e.lambda.hi() {
            return fail(checked, Some(n), "recomputed lambda is disjoint from the certified enclosure".into());
        }
        checked += 1;
    }
    for b in &cert.blocks {
        if !cert.entries.iter().any(|e| e.n == b.k) {
            return fail(checked, Some(b.k), "marked index has no certificate entry".into());
        }
    }
    if !alpha.digits.is_empty() {
        let threshold = strengthened_threshold(alpha, &table, &lambdas, &cert.gamma, &cert.pad)?;
        if threshold != cert.threshold_q {
            return fail(checked, None, "threshold_q does not match the recomputed value".into());
        }
    }
    Ok(RecheckReport { checked, failure: None })
}
