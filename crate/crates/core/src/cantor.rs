//! Cylinders of digit-restricted Cantor sets and the Hall-type subdivision
//! that writes a target `t` as `μ + ν` with `μ, ν` in the set.
//!
//! The subdivision keeps two digit prefixes `b` and `c` with
//! `t ∈ I(b) + I(c)`, where `I` is the rational cylinder enclosure. Each step
//! refines the wider cylinder by the smallest digit that keeps `t` covered.
//! Sub-cylinder sums need not be intervals, so a dead end backtracks to the
//! last choice point. Digits handed out to a consumer are frozen and never
//! revised.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cf::Mobius;
use crate::digits::{DigitSystem, EventuallyPeriodic};
use crate::error::{Error, Result};
use crate::interval::{Enclosure, RationalInterval};
use crate::surd::QuadraticSurd;

/// Default cap on `|b| + |c|` for [`decompose`].
pub const DEFAULT_DEPTH_CAP: usize = 500;

/// Default cap on subdivision steps, backtracking included.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Per-stream digit cap used by [`represent_gamma`].
pub const STREAM_DIGIT_CAP: usize = 10_000;

/// The set of `[0; prefix, tail]` with every admissible tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    system: DigitSystem,
    prefix: Vec<u64>,
}

impl Cylinder {
    pub fn new(system: DigitSystem, prefix: Vec<u64>) -> Result<Self> {
        system.validate(&prefix, None)?;
        Ok(Cylinder { system, prefix })
    }

    pub fn root(system: DigitSystem) -> Self {
        Cylinder { system, prefix: Vec::new() }
    }

    pub fn system(&self) -> &DigitSystem {
        &self.system
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn child(&self, d: u64) -> Result<Cylinder> {
        self.system.validate(&[d], self.prefix.last().copied())?;
        let mut prefix = self.prefix.clone();
        prefix.push(d);
        Ok(Cylinder { system: self.system.clone(), prefix })
    }

    /// Rational enclosure; children's enclosures nest inside it exactly.
    pub fn interval(&self) -> RationalInterval {
        let m = Mobius::from_digits(&BigInt::zero(), &self.prefix);
        m.apply_interval(self.system.tail_enclosure(self.prefix.last().copied()))
    }

    /// Exact infimum and supremum of the cylinder.
    pub fn exact_bounds(&self) -> (QuadraticSurd, QuadraticSurd) {
        let m = Mobius::from_digits(&BigInt::zero(), &self.prefix);
        let (lo, hi) = self.system.extremal_tails(self.prefix.last().copied());
        let (a, b) = (m.apply_surd(&lo), m.apply_surd(&hi));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

pub fn cylinder_interval(cyl: &Cylinder) -> RationalInterval {
    cyl.interval()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    B,
    C,
}

/// Unreduced fraction `n / d` with `d > 0`. The subdivision works on huge
/// convergents, and skipping gcd normalisation is what keeps it fast.
#[derive(Clone, Debug)]
pub(crate) struct Frac {
    pub(crate) n: BigInt,
    pub(crate) d: BigInt,
}

impl Frac {
    pub(crate) fn from_rational(r: &BigRational) -> Self {
        Frac { n: r.numer().clone(), d: r.denom().clone() }
    }

    pub(crate) fn to_rational(&self) -> BigRational {
        BigRational::new(self.n.clone(), self.d.clone())
    }

    pub(crate) fn add(&self, o: &Frac) -> Frac {
        Frac { n: &self.n * &o.d + &o.n * &self.d, d: &self.d * &o.d }
    }

    pub(crate) fn sub(&self, o: &Frac) -> Frac {
        Frac { n: &self.n * &o.d - &o.n * &self.d, d: &self.d * &o.d }
    }

    pub(crate) fn cmp(&self, o: &Frac) -> Ordering {
        (&self.n * &o.d).cmp(&(&o.n * &self.d))
    }
}

/// `t ↦ (p + t·p') / (q + t·q')` at `t = x`, unreduced.
fn mobius_at(m: &Mobius, x: &BigRational) -> Frac {
    let (a, b) = (x.numer(), x.denom());
    let n = &m.p * b + a * &m.p_prev;
    let d = &m.q * b + a * &m.q_prev;
    if d.sign() == num_bigint::Sign::Minus {
        Frac { n: -n, d: -d }
    } else {
        Frac { n, d }
    }
}

#[derive(Clone, Debug)]
struct RawInterval {
    lo: Frac,
    hi: Frac,
}

impl RawInterval {
    fn image(m: &Mobius, tail: &RationalInterval) -> Self {
        let a = mobius_at(m, tail.lo());
        let b = mobius_at(m, tail.hi());
        if a.cmp(&b) == Ordering::Greater {
            RawInterval { lo: b, hi: a }
        } else {
            RawInterval { lo: a, hi: b }
        }
    }

    fn width(&self) -> Frac {
        self.hi.sub(&self.lo)
    }

    fn add(&self, o: &RawInterval) -> RawInterval {
        RawInterval { lo: self.lo.add(&o.lo), hi: self.hi.add(&o.hi) }
    }

    fn to_interval(&self) -> RationalInterval {
        RationalInterval::new(self.lo.to_rational(), self.hi.to_rational()).expect("ordered")
    }
}

/// Sign-exact comparison of a surd with an unreduced fraction.
fn cmp_surd_frac(t: &QuadraticSurd, f: &Frac) -> Ordering {
    let (a, b) = (t.rational_part(), t.coeff());
    // t − n/d scaled by the positive factor denom(a)·d·denom(b):
    // x + y·√r with x = (numer(a)·d − n·denom(a))·denom(b), y = numer(b)·denom(a)·d.
    let x = (a.numer() * &f.d - &f.n * a.denom()) * b.denom();
    if b.is_zero() {
        return x.sign().cmp(&num_bigint::Sign::NoSign);
    }
    let y = b.numer() * a.denom() * &f.d;
    let r = BigInt::from(t.radicand().clone());
    let sx = x.sign();
    let sy = y.sign();
    use num_bigint::Sign::*;
    match (sx, sy) {
        (NoSign, _) => sy.cmp(&NoSign),
        (_, NoSign) => sx.cmp(&NoSign),
        (Plus, Plus) => Ordering::Greater,
        (Minus, Minus) => Ordering::Less,
        // Opposite signs: compare x² with y²·r.
        (Plus, Minus) => (&x * &x).cmp(&(&y * &y * &r)),
        (Minus, Plus) => (&y * &y * &r).cmp(&(&x * &x)),
    }
}

/// One digit stream of the subdivision: digits, the prefix map and the
/// current cylinder enclosure. Earlier maps are recovered by inverting the
/// recurrence, so memory stays linear in the digit count.
#[derive(Clone, Debug)]
struct Stream {
    digits: Vec<u64>,
    map: Mobius,
    interval: RawInterval,
}

impl Stream {
    fn new(system: &DigitSystem) -> Self {
        let map = Mobius::identity();
        let interval = RawInterval::image(&map, system.tail_enclosure(None));
        Stream { digits: Vec::new(), map, interval }
    }

    fn interval(&self) -> &RawInterval {
        &self.interval
    }

    fn child(&self, system: &DigitSystem, d: u64) -> (Mobius, RawInterval) {
        let mut m = self.map.clone();
        m.push(d);
        let iv = RawInterval::image(&m, system.tail_enclosure(Some(d)));
        (m, iv)
    }

    fn push(&mut self, d: u64, m: Mobius, iv: RawInterval) {
        self.digits.push(d);
        self.map = m;
        self.interval = iv;
    }

    fn pop(&mut self, system: &DigitSystem) {
        let d = BigInt::from(self.digits.pop().expect("nonempty stream"));
        let m = &self.map;
        let prev = Mobius {
            p: m.p_prev.clone(),
            p_prev: &m.p - &d * &m.p_prev,
            q: m.q_prev.clone(),
            q_prev: &m.q - &d * &m.q_prev,
        };
        self.interval = RawInterval::image(&prev, system.tail_enclosure(self.digits.last().copied()));
        self.map = prev;
    }
}

#[derive(Clone, Debug)]
struct Frame {
    side: Side,
    untried: Vec<u64>,
}

/// Depth-first Hall subdivision with backtracking and frozen prefixes.
#[derive(Clone, Debug)]
pub struct Decomposer {
    system: DigitSystem,
    target: QuadraticSurd,
    b: Stream,
    c: Stream,
    frames: Vec<Frame>,
    frozen: [usize; 2],
    max_digits: usize,
    node_budget: usize,
    nodes: usize,
}

impl Decomposer {
    /// Starts at the root cylinders; fails if the target is not covered
    /// there.
    pub fn new(target: QuadraticSurd, system: DigitSystem, max_digits: usize, node_budget: usize) -> Result<Self> {
        let d = Decomposer {
            b: Stream::new(&system),
            c: Stream::new(&system),
            system,
            target,
            frames: Vec::new(),
            frozen: [0, 0],
            max_digits,
            node_budget,
            nodes: 0,
        };
        if !d.covers_target() {
            let root = d.sum_interval();
            return Err(Error::OutOfRange {
                target: d.target.to_decimal(30),
                lo: crate::surd::rational_to_decimal(root.lo(), 30),
                hi: crate::surd::rational_to_decimal(root.hi(), 30),
            });
        }
        Ok(d)
    }

    pub fn system(&self) -> &DigitSystem {
        &self.system
    }

    pub fn target(&self) -> &QuadraticSurd {
        &self.target
    }

    pub fn b(&self) -> &[u64] {
        &self.b.digits
    }

    pub fn c(&self) -> &[u64] {
        &self.c.digits
    }

    pub fn b_interval(&self) -> RationalInterval {
        self.b.interval().to_interval()
    }

    pub fn c_interval(&self) -> RationalInterval {
        self.c.interval().to_interval()
    }

    /// `I(b) + I(c)`.
    pub fn sum_interval(&self) -> RationalInterval {
        self.b.interval().add(self.c.interval()).to_interval()
    }

    pub fn covers_target(&self) -> bool {
        self.covers(&self.b.interval().add(self.c.interval()))
    }

    fn covers(&self, sum: &RawInterval) -> bool {
        cmp_surd_frac(&self.target, &sum.lo) != Ordering::Less
            && cmp_surd_frac(&self.target, &sum.hi) != Ordering::Greater
    }

    /// Subdivision steps taken so far, backtracking included.
    pub fn steps(&self) -> usize {
        self.nodes
    }

    pub fn frozen_b(&self) -> usize {
        self.frozen[0]
    }

    pub fn frozen_c(&self) -> usize {
        self.frozen[1]
    }

    /// Forbids backtracking into the first `len` digits of `b`.
    pub fn freeze_b(&mut self, len: usize) {
        self.frozen[0] = self.frozen[0].max(len.min(self.b.digits.len()));
    }

    pub fn freeze_c(&mut self, len: usize) {
        self.frozen[1] = self.frozen[1].max(len.min(self.c.digits.len()));
    }

    fn stream(&self, side: Side) -> &Stream {
        match side {
            Side::B => &self.b,
            Side::C => &self.c,
        }
    }

    fn stream_mut(&mut self, side: Side) -> &mut Stream {
        match side {
            Side::B => &mut self.b,
            Side::C => &mut self.c,
        }
    }

    fn frozen_len(&self, side: Side) -> usize {
        match side {
            Side::B => self.frozen[0],
            Side::C => self.frozen[1],
        }
    }

    fn other(side: Side) -> Side {
        match side {
            Side::B => Side::C,
            Side::C => Side::B,
        }
    }

    fn covering_child(&self, side: Side, d: u64) -> Option<(Mobius, RawInterval)> {
        let (m, iv) = self.stream(side).child(&self.system, d);
        let sum = iv.add(self.stream(Self::other(side)).interval());
        self.covers(&sum).then_some((m, iv))
    }

    /// Refines the wider cylinder by one digit, backtracking on dead ends.
    pub fn step(&mut self) -> Result<()> {
        if self.b.digits.len() + self.c.digits.len() >= self.max_digits {
            return Err(Error::DepthExceeded { cap: self.max_digits });
        }
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::NoDecomposition {
                detail: format!("node budget of {} steps exhausted", self.node_budget),
            });
        }
        let wider_b = self.b.interval().width().cmp(&self.c.interval().width()) != Ordering::Less;
        let side = if wider_b { Side::B } else { Side::C };
        let last = self.stream(side).digits.last().copied();
        let mut succ = self.system.successors(last).into_iter();
        let chosen = succ.by_ref().find_map(|d| self.covering_child(side, d).map(|(m, iv)| (d, m, iv)));
        match chosen {
            Some((d, m, iv)) => {
                self.stream_mut(side).push(d, m, iv);
                // Later candidates are re-checked lazily when backtracking.
                self.frames.push(Frame { side, untried: succ.collect() });
            }
            None => self.backtrack()?,
        }
        debug_assert!(self.covers_target(), "subdivision lost the target");
        Ok(())
    }

    fn backtrack(&mut self) -> Result<()> {
        loop {
            let Some(mut frame) = self.frames.pop() else {
                return Err(Error::NoDecomposition { detail: "every branch exhausted".into() });
            };
            let side = frame.side;
            let len = self.stream(side).digits.len();
            if len <= self.frozen_len(side) {
                return Err(Error::NoDecomposition { detail: format!("dead end behind {len} frozen digits") });
            }
            let system = self.system.clone();
            self.stream_mut(side).pop(&system);
            while !frame.untried.is_empty() {
                let d = frame.untried.remove(0);
                // Still covering: the other stream may have moved since.
                if let Some((m, iv)) = self.covering_child(side, d) {
                    self.stream_mut(side).push(d, m, iv);
                    self.frames.push(frame);
                    return Ok(());
                }
            }
        }
    }

    /// Steps until the sum width is at most `goal`.
    pub fn refine_to(&mut self, goal: &BigRational) -> Result<()> {
        let goal = Frac::from_rational(goal);
        while self.b.interval().add(self.c.interval()).width().cmp(&goal) == Ordering::Greater {
            self.step()?;
        }
        Ok(())
    }

    /// Steps until `I(b)` is at most `goal` wide.
    pub fn refine_b_to(&mut self, goal: &BigRational) -> Result<()> {
        let goal = Frac::from_rational(goal);
        while self.b.interval().width().cmp(&goal) == Ordering::Greater {
            self.step()?;
        }
        Ok(())
    }

    pub fn refine_c_to(&mut self, goal: &BigRational) -> Result<()> {
        let goal = Frac::from_rational(goal);
        while self.c.interval().width().cmp(&goal) == Ordering::Greater {
            self.step()?;
        }
        Ok(())
    }

    /// Steps until `b` has at least `len` digits.
    pub fn extend_b(&mut self, len: usize) -> Result<()> {
        while self.b.digits.len() < len {
            self.step()?;
        }
        Ok(())
    }

    pub fn extend_c(&mut self, len: usize) -> Result<()> {
        while self.c.digits.len() < len {
            self.step()?;
        }
        Ok(())
    }
}

/// Result of [`decompose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub sum_interval: RationalInterval,
    pub steps: usize,
}

/// Writes `target` as an element of `I(b) + I(c)` of width at most `goal`,
/// within [`DEFAULT_DEPTH_CAP`] digits.
pub fn decompose(target: &QuadraticSurd, system: &DigitSystem, goal: &BigRational) -> Result<Decomposition> {
    decompose_with(target, system, goal, DEFAULT_DEPTH_CAP, DEFAULT_NODE_BUDGET)
}

pub fn decompose_with(
    target: &QuadraticSurd,
    system: &DigitSystem,
    goal: &BigRational,
    depth_cap: usize,
    node_budget: usize,
) -> Result<Decomposition> {
    if let Some(g) = system.guaranteed_sum() {
        if target < &g.lo || target > &g.hi {
            return Err(Error::OutOfRange {
                target: target.to_decimal(30),
                lo: g.lo.to_decimal(30),
                hi: g.hi.to_decimal(30),
            });
        }
        for (end, pair) in [(&g.lo, &g.lo_pair), (&g.hi, &g.hi_pair)] {
            if target == end {
                return endpoint_decomposition(system, pair, goal, depth_cap);
            }
        }
    }
    let mut d = Decomposer::new(target.clone(), system.clone(), depth_cap, node_budget)?;
    d.refine_to(goal)?;
    Ok(Decomposition { b: d.b().to_vec(), c: d.c().to_vec(), sum_interval: d.sum_interval(), steps: d.steps() })
}

/// At an endpoint of the guaranteed interval the decomposition is the
/// extremal pair itself; its prefixes are grown until narrow enough.
fn endpoint_decomposition(
    system: &DigitSystem,
    pair: &(EventuallyPeriodic, EventuallyPeriodic),
    goal: &BigRational,
    depth_cap: usize,
) -> Result<Decomposition> {
    let (mut lb, mut lc, mut steps) = (0usize, 0usize, 0usize);
    let iv =
        |seq: &EventuallyPeriodic, len: usize| Cylinder { system: system.clone(), prefix: seq.prefix(len) }.interval();
    loop {
        let (ib, ic) = (iv(&pair.0, lb), iv(&pair.1, lc));
        let sum = &ib + &ic;
        if &sum.width() <= goal {
            return Ok(Decomposition { b: pair.0.prefix(lb), c: pair.1.prefix(lc), sum_interval: sum, steps });
        }
        if lb + lc >= depth_cap {
            return Err(Error::DepthExceeded { cap: depth_cap });
        }
        if ib.width() >= ic.width() {
            lb += 1;
        } else {
            lc += 1;
        }
        steps += 1;
    }
}

/// Which of the three representations `γ = c + μ + ν` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// `c = 4`, digits at most 3.
    Repr4,
    /// `c = 5`, Freiman–Judin digits.
    Repr5,
    /// `c ≥ 5`, digits at most 4.
    Repr6,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Repr4 => "repr4",
            Regime::Repr5 => "repr5",
            Regime::Repr6 => "repr6",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "repr4" => Ok(Regime::Repr4),
            "repr5" => Ok(Regime::Repr5),
            "repr6" => Ok(Regime::Repr6),
            _ => Err(Error::InvalidParams(format!("unknown regime {name:?}"))),
        }
    }

    pub fn system(self) -> DigitSystem {
        match self {
            Regime::Repr4 => DigitSystem::bounded(3).expect("F3"),
            Regime::Repr5 => DigitSystem::freiman_judin(),
            Regime::Repr6 => DigitSystem::bounded(4).expect("F4"),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `4 + [0; (3,1)^∞] + [0; 2, (1,3)^∞] = (51 + 4√21)/15`, the least γ the
/// constructions handle.
pub fn threshold() -> QuadraticSurd {
    QuadraticSurd::new(51, 336u32, 15).expect("nonzero denominator")
}

/// `10 − √21`, where the representation switches from `F_3` to
/// Freiman–Judin digits.
pub fn hall_gap_point() -> QuadraticSurd {
    QuadraticSurd::from(10) - QuadraticSurd::sqrt(21u32)
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
enum Source {
    Subdivision(Decomposer),
    Periodic { mu: EventuallyPeriodic, nu: EventuallyPeriodic, exposed: [usize; 2], mu_stream: Stream },
}

/// `γ = c + μ + ν` with `μ, ν` produced digit by digit on demand.
#[derive(Clone, Debug)]
pub struct GammaRepresentation {
    gamma: QuadraticSurd,
    regime: Regime,
    c: u64,
    system: DigitSystem,
    source: Source,
}

impl GammaRepresentation {
    pub fn gamma(&self) -> &QuadraticSurd {
        &self.gamma
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn system(&self) -> &DigitSystem {
        &self.system
    }

    /// `γ − c`.
    pub fn target(&self) -> QuadraticSurd {
        self.gamma.add_rational(&-BigRational::from_integer(BigInt::from(self.c)))
    }

    /// True when `μ` and `ν` are the extremal periodic tails and known exactly.
    pub fn is_periodic(&self) -> bool {
        matches!(self.source, Source::Periodic { .. })
    }

    /// The first `len` digits of `μ`; they are frozen from now on.
    pub fn mu_digits(&mut self, len: usize) -> Result<Vec<u64>> {
        match &mut self.source {
            Source::Subdivision(d) => {
                d.extend_b(len)?;
                d.freeze_b(len);
                Ok(d.b()[..len].to_vec())
            }
            Source::Periodic { mu, exposed, .. } => {
                exposed[0] = exposed[0].max(len);
                Ok(mu.prefix(len))
            }
        }
    }

    pub fn nu_digits(&mut self, len: usize) -> Result<Vec<u64>> {
        match &mut self.source {
            Source::Subdivision(d) => {
                d.extend_c(len)?;
                d.freeze_c(len);
                Ok(d.c()[..len].to_vec())
            }
            Source::Periodic { nu, exposed, .. } => {
                exposed[1] = exposed[1].max(len);
                Ok(nu.prefix(len))
            }
        }
    }

    /// Enclosure of `μ` no wider than `width`; freezes the digits it used.
    pub fn mu_enclosure(&mut self, width: &BigRational) -> Result<Enclosure> {
        match &mut self.source {
            Source::Subdivision(d) => {
                d.refine_b_to(width)?;
                let len = d.b().len();
                d.freeze_b(len);
                Ok(Enclosure::Range(d.b_interval()))
            }
            Source::Periodic { mu, .. } => Ok(Enclosure::Exact(mu.value())),
        }
    }

    /// Unreduced bounds of `μ` no wider than `width`, freezing the digits
    /// used.
    pub(crate) fn mu_bounds(&mut self, width: &BigRational) -> Result<(Frac, Frac)> {
        match &mut self.source {
            Source::Subdivision(d) => {
                d.refine_b_to(width)?;
                let len = d.b().len();
                d.freeze_b(len);
                Ok((d.b.interval.lo.clone(), d.b.interval.hi.clone()))
            }
            Source::Periodic { mu, exposed, mu_stream, .. } => {
                let goal = Frac::from_rational(width);
                while mu_stream.interval.width().cmp(&goal) == Ordering::Greater {
                    let d = mu.digit(mu_stream.digits.len());
                    let (m, iv) = mu_stream.child(&self.system, d);
                    mu_stream.push(d, m, iv);
                }
                exposed[0] = exposed[0].max(mu_stream.digits.len());
                Ok((mu_stream.interval.lo.clone(), mu_stream.interval.hi.clone()))
            }
        }
    }

    pub fn nu_enclosure(&mut self, width: &BigRational) -> Result<Enclosure> {
        match &mut self.source {
            Source::Subdivision(d) => {
                d.refine_c_to(width)?;
                let len = d.c().len();
                d.freeze_c(len);
                Ok(Enclosure::Range(d.c_interval()))
            }
            Source::Periodic { nu, .. } => Ok(Enclosure::Exact(nu.value())),
        }
    }

    /// Refines both streams until `c + I(μ) + I(ν)` is at most `goal` wide.
    pub fn refine_to(&mut self, goal: &BigRational) -> Result<()> {
        match &mut self.source {
            Source::Subdivision(d) => d.refine_to(goal),
            Source::Periodic { mu, nu, exposed, .. } => loop {
                let ib = Cylinder { system: self.system.clone(), prefix: mu.prefix(exposed[0]) }.interval();
                let ic = Cylinder { system: self.system.clone(), prefix: nu.prefix(exposed[1]) }.interval();
                if &(ib.width() + ic.width()) <= goal {
                    return Ok(());
                }
                if exposed[0] + exposed[1] >= 2 * STREAM_DIGIT_CAP {
                    return Err(Error::DepthExceeded { cap: 2 * STREAM_DIGIT_CAP });
                }
                if ib.width() >= ic.width() {
                    exposed[0] += 1;
                } else {
                    exposed[1] += 1;
                }
            },
        }
    }

    /// Current prefixes of `μ` and `ν` (frozen or not).
    pub fn prefixes(&self) -> (Vec<u64>, Vec<u64>) {
        match &self.source {
            Source::Subdivision(d) => (d.b().to_vec(), d.c().to_vec()),
            Source::Periodic { mu, nu, exposed, .. } => (mu.prefix(exposed[0]), nu.prefix(exposed[1])),
        }
    }

    /// `c + I(b) + I(c)` for the current prefixes; always contains `γ`.
    pub fn sum_interval(&self) -> RationalInterval {
        let (b, c) = self.prefixes();
        let ib = Cylinder { system: self.system.clone(), prefix: b }.interval();
        let ic = Cylinder { system: self.system.clone(), prefix: c }.interval();
        (&ib + &ic).add_scalar(&BigRational::from_integer(BigInt::from(self.c)))
    }

    /// Subdivision steps so far (zero for periodic representations).
    pub fn steps(&self) -> usize {
        match &self.source {
            Source::Subdivision(d) => d.steps(),
            Source::Periodic { .. } => 0,
        }
    }
}

fn unsupported(gamma: &QuadraticSurd, reason: &str) -> Error {
    Error::UnsupportedGamma { gamma: gamma.to_string(), reason: reason.to_string() }
}

/// Regime and integer part for `γ`.
pub fn classify(gamma: &QuadraticSurd) -> Result<(Regime, u64)> {
    if gamma < &threshold() {
        return Err(unsupported(
            gamma,
            "below 4 + [0; 3,1,3,1,...] + [0; 2,1,3,1,3,...] = (51 + 4*sqrt(21))/15 = 4.62202..., \
             the least value covered by the two-sided construction",
        ));
    }
    if gamma <= &hall_gap_point() {
        return Ok((Regime::Repr4, 4));
    }
    if gamma <= &QuadraticSurd::from(6) {
        return Ok((Regime::Repr5, 5));
    }
    // Largest c with γ − c > √2 − 1; then γ − c ≤ √2 < 4√2 − 4.
    let hall_lo = QuadraticSurd::sqrt(2u32) - QuadraticSurd::one();
    let mut c = gamma.floor();
    while gamma.add_rational(&-BigRational::from_integer(c.clone())) <= hall_lo {
        c -= 1;
    }
    let c: u64 = u64::try_from(c).map_err(|_| unsupported(gamma, "integer part exceeds 64 bits"))?;
    Ok((Regime::Repr6, c))
}

/// Representation with the default stream caps.
pub fn represent_gamma(gamma: &QuadraticSurd) -> Result<GammaRepresentation> {
    represent_gamma_with(gamma, 2 * STREAM_DIGIT_CAP, DEFAULT_NODE_BUDGET)
}

pub fn represent_gamma_with(
    gamma: &QuadraticSurd,
    max_digits: usize,
    node_budget: usize,
) -> Result<GammaRepresentation> {
    let (regime, c) = classify(gamma)?;
    let system = regime.system();
    let target = gamma.add_rational(&-BigRational::from_integer(BigInt::from(c)));
    let g = system.guaranteed_sum().expect("regime systems have a guaranteed sum");
    let source = if target == g.lo {
        Source::Periodic {
            mu: g.lo_pair.0.clone(),
            nu: g.lo_pair.1.clone(),
            exposed: [0, 0],
            mu_stream: Stream::new(&system),
        }
    } else if target == g.hi {
        Source::Periodic {
            mu: g.hi_pair.0.clone(),
            nu: g.hi_pair.1.clone(),
            exposed: [0, 0],
            mu_stream: Stream::new(&system),
        }
    } else if target < g.lo || target > g.hi {
        return Err(unsupported(gamma, "outside the guaranteed sum interval of its regime"));
    } else {
        Source::Subdivision(Decomposer::new(target, system.clone(), max_digits, node_budget)?)
    };
    Ok(GammaRepresentation { gamma: gamma.clone(), regime, c, system, source })
}

/// `10^-k` as an exact rational.
pub fn ten_pow_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

/// Short human-readable description used in diagnostics.
pub fn describe(rep: &GammaRepresentation) -> String {
    let (b, c) = rep.prefixes();
    format!("{} = {} + [0; {:?}…] + [0; {:?}…] ({})", rep.gamma, rep.c, b, c, rep.regime)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn q(n: i64, d: i64) -> QuadraticSurd {
        QuadraticSurd::from_rational(r(n, d))
    }

    #[test]
    fn root_cylinder_matches_extremal_tails() {
        let f4 = DigitSystem::bounded(4).unwrap();
        let root = Cylinder::root(f4.clone());
        let (lo, hi) = root.exact_bounds();
        assert_eq!(lo, QuadraticSurd::new(-1, 2u32, 2).unwrap());
        assert_eq!(hi, QuadraticSurd::new(-2, 8u32, 1).unwrap());
        assert!(root.interval().contains_surd(&lo));
        assert!(root.interval().contains_surd(&hi));
        let four = root.child(4).unwrap().interval();
        assert!(four.lo() > &r(1, 5) && four.hi() < &r(26, 100));
        let one_one = root.child(1).unwrap().child(1).unwrap().interval();
        assert!(one_one.is_subset_of(&root.interval()));
    }

    #[test]
    fn out_of_range_target_is_rejected() {
        let f4 = DigitSystem::bounded(4).unwrap();
        let e = decompose(&q(3, 10), &f4, &r(1, 1000)).unwrap_err();
        assert!(matches!(e, Error::OutOfRange { .. }));
    }

    #[test]
    fn decomposes_one_in_f4() {
        let f4 = DigitSystem::bounded(4).unwrap();
        let goal = ten_pow_neg(20);
        let d = decompose(&q(1, 1), &f4, &goal).unwrap();
        let ib = Cylinder::new(f4.clone(), d.b.clone()).unwrap().interval();
        let ic = Cylinder::new(f4.clone(), d.c.clone()).unwrap().interval();
        let sum = &ib + &ic;
        assert!(sum.contains(&r(1, 1)));
        assert!(sum.width() <= goal);
    }

    #[test]
    fn endpoint_uses_extremal_pair() {
        let f3 = DigitSystem::bounded(3).unwrap();
        let lo = f3.guaranteed_sum().unwrap().lo.clone();
        let d = decompose(&lo, &f3, &ten_pow_neg(10)).unwrap();
        assert_eq!(d.b[..4], [3, 1, 3, 1]);
        assert_eq!(d.c[..3], [2, 1, 3]);
        assert!(d.sum_interval.contains_surd(&lo));
    }

    #[test]
    fn regimes_follow_closed_right_convention() {
        assert_eq!(classify(&hall_gap_point()).unwrap(), (Regime::Repr4, 4));
        assert_eq!(classify(&QuadraticSurd::from(6)).unwrap(), (Regime::Repr5, 5));
        assert_eq!(classify(&QuadraticSurd::from(7)).unwrap(), (Regime::Repr6, 6));
        assert_eq!(classify(&q(61, 10)).unwrap(), (Regime::Repr6, 5));
        assert_eq!(classify(&threshold()).unwrap(), (Regime::Repr4, 4));
        assert!(matches!(classify(&q(46, 10)), Err(Error::UnsupportedGamma { .. })));
    }

    #[test]
    fn representation_streams_are_frozen_once_exposed() {
        let mut rep = represent_gamma(&q(49, 10)).unwrap();
        let b = rep.mu_digits(6).unwrap();
        let c = rep.nu_digits(6).unwrap();
        rep.refine_to(&ten_pow_neg(25)).unwrap();
        assert_eq!(rep.mu_digits(6).unwrap(), b);
        assert_eq!(rep.nu_digits(6).unwrap(), c);
        assert!(rep.sum_interval().contains(&r(49, 10)));
        assert!(b.iter().chain(&c).all(|&d| d <= 3));
    }
}
