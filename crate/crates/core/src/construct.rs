//! Block construction of a witness `α` and its certificate.
//!
//! One-sided mode builds `α = [0; C, B_1, C, B_2, C, …]` and two-sided mode
//! `α = [0; B_1, B_2, …]`, where `B_i = b_m, …, b_1, s, c_1, …, c_n` is cut
//! from the digit streams of `γ = s + μ + ν`. The index `k_i` of the
//! separator `s` is the marked index of block `i`.
//!
//! `m_i` is the least admissible size with `α*_{k-1} − μ ∈ (0, ϖ(q_k)/(2q_k²))`
//! (absolute value in two-sided mode), and `n_i` the least admissible size
//! with `|[0; c_1, …, c_n, rest] − ν| < α*_{k-1} − μ`. Together they pin
//! `λ_{k_i}` strictly inside `(γ, γ + ϖ(q_k)/q_k²)`, or inside the band
//! `|λ_{k_i} − γ| < ϖ(q_k)/q_k²` in two-sided mode.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cantor::{classify, Frac, GammaRepresentation, Regime};
use crate::cf::{tail_value, CfExpansion, ConvergentTable, Mobius, Tail};
use crate::digits::DigitSystem;
use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::pad::PadFunction;
use crate::surd::QuadraticSurd;

/// Default cap on `m_i` and `n_i`.
pub const MAX_BLOCK_DIGITS: usize = 10_000;

/// Default number of stream digits allowed beyond a block when deciding a
/// comparison.
pub const LOOKAHEAD: usize = 10_000;

/// Block sizes in two-sided mode must exceed this.
pub const TWO_SIDED_MIN: usize = 20;

/// Largest `n_0` tried by [`find_n0`].
const MAX_N0: usize = 1000;

/// Lookahead used for a first, cheap certificate pass.
const SHORT_LOOKAHEAD: usize = 48;

/// Reduction factor between a comparison's scale and the stream width
/// requested for it.
const REFINE_FACTOR: u32 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    OneSided,
    TwoSided,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::OneSided => "one",
            Mode::TwoSided => "two",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "one" | "one-sided" => Ok(Mode::OneSided),
            "two" | "two-sided" => Ok(Mode::TwoSided),
            _ => Err(Error::InvalidParams(format!("unknown mode {s:?}; expected one or two"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Rational lower bound of a positive surd.
fn positive_lower_bound(x: &QuadraticSurd) -> BigRational {
    if let Some(r) = x.to_rational() {
        return r;
    }
    let mut bits = 64;
    loop {
        let lo = x.enclose(bits).lo().clone();
        if lo.is_positive() {
            return lo;
        }
        bits *= 2;
    }
}

/// `(n_0, ε)` such that `λ_n, λ_{n+1} < γ − ε` whenever `α` contains the
/// regime's `C` pattern with the starred digit at index `n`.
pub fn find_n0(gamma: &QuadraticSurd, regime: Regime) -> Result<(usize, BigRational)> {
    let (actual, c) = classify(gamma)?;
    let one_sided_ok = regime == actual || (regime == Regime::Repr4 && actual == Regime::Repr5);
    if !one_sided_ok || gamma <= &QuadraticSurd::from(5) {
        return Err(Error::InvalidParams(format!("gamma {gamma} does not admit a one-sided {regime} pattern")));
    }
    let limit = match regime {
        Regime::Repr4 => int(5),
        Regime::Repr5 => rat(16, 3),
        Regime::Repr6 => int(6),
    };
    let gap = gamma.add_rational(&-&limit);
    if !gap.is_positive() {
        return Err(Error::InvalidParams(format!("gamma {gamma} is not above the pattern limit {limit}")));
    }
    let epsilon = positive_lower_bound(&gap) / int(2);
    if regime == Regime::Repr5 {
        return Ok((0, epsilon));
    }
    let system = DigitSystem::bounded(tail_digit_bound(regime, c))?;
    let bound = gamma.add_rational(&-&epsilon);
    for n0 in 1..=MAX_N0 {
        let pattern = c_block(regime, n0);
        let star = 2 * n0;
        let ok = [star, star + 1].iter().all(|&i| {
            let hi = pattern_lambda_hi(&pattern, i, &system);
            bound.cmp_rational(&hi) == Ordering::Greater
        });
        if ok {
            return Ok((n0, epsilon));
        }
    }
    Err(Error::InvalidParams(format!("no n0 up to {MAX_N0} separates gamma {gamma} from the pattern limit")))
}

/// Upper end of `λ` at position `i` (0-based) of `pattern`, over every
/// continuation on both sides inside `system`.
fn pattern_lambda_hi(pattern: &[u64], i: usize, system: &DigitSystem) -> BigRational {
    let left: Vec<u64> = pattern[..i].iter().rev().copied().collect();
    let right = &pattern[i + 1..];
    let outside = system.tail_enclosure(None);
    let star = Mobius::from_digits(&BigInt::zero(), &left).apply_interval(outside);
    let tail = Mobius::from_digits(&BigInt::zero(), right).apply_interval(outside);
    int(pattern[i]) + star.hi() + tail.hi()
}

/// Largest partial quotient occurring in one-sided witnesses of `regime`.
fn tail_digit_bound(regime: Regime, c: u64) -> u64 {
    match regime {
        Regime::Repr4 => 4,
        Regime::Repr5 => 5,
        Regime::Repr6 => c.max(5),
    }
}

/// The `C` block: `(3,1)^n0, 4, 4, (1,3)^n0`, `(4,1)^n0, 5, 5, (1,4)^n0`, or
/// `1, 4, 4, 1`.
pub fn c_block(regime: Regime, n0: usize) -> Vec<u64> {
    let (hi, lo, mid) = match regime {
        Regime::Repr4 => (3, 1, 4),
        Regime::Repr6 => (4, 1, 5),
        Regime::Repr5 => return alloc::vec![1, 4, 4, 1],
    };
    let mut v = Vec::with_capacity(4 * n0 + 2);
    for _ in 0..n0 {
        v.extend([hi, lo]);
    }
    v.extend([mid, mid]);
    for _ in 0..n0 {
        v.extend([lo, hi]);
    }
    v
}

/// Shape of the blocks for a parameter set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    /// Digits inserted before every block (empty in two-sided mode).
    pub c_digits: Vec<u64>,
    pub separator: u64,
    /// `Some(1)` for odd sizes, `Some(0)` for even, `None` for any.
    pub parity: Option<usize>,
    /// Smallest allowed `m` and `n`.
    pub min_size: usize,
}

impl BlockSpec {
    /// Least admissible size strictly above `prev`.
    pub fn next_size(&self, prev: usize) -> usize {
        let mut s = (prev + 1).max(self.min_size);
        if let Some(p) = self.parity {
            if s % 2 != p {
                s += 1;
            }
        }
        s
    }

    pub fn size_step(&self) -> usize {
        if self.parity.is_some() {
            2
        } else {
            1
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub gamma: QuadraticSurd,
    pub pad: PadFunction,
    /// The requested mode.
    pub mode: Mode,
    pub regime: Regime,
    /// Integer part `c` of the representation; also the separator digit.
    pub c: u64,
    pub n0: usize,
    /// Margin below `γ` certified for every unmarked index.
    pub epsilon: BigRational,
    pub max_block_digits: usize,
    pub lookahead: usize,
}

impl ConstructionParams {
    pub fn new(gamma: QuadraticSurd, pad: PadFunction, mode: Mode) -> Result<Self> {
        pad.validate()?;
        let five = QuadraticSurd::from(5);
        if mode == Mode::OneSided && gamma <= five {
            return Err(Error::UnsupportedGamma {
                gamma: gamma.to_string(),
                reason: "the one-sided construction needs gamma > 5".into(),
            });
        }
        let (regime, c) = classify(&gamma)?;
        let two_sided_blocks = mode == Mode::TwoSided && gamma <= five;
        let (n0, epsilon) = if two_sided_blocks { (0, two_sided_margin(&gamma)) } else { find_n0(&gamma, regime)? };
        Ok(ConstructionParams {
            gamma,
            pad,
            mode,
            regime,
            c,
            n0,
            epsilon,
            max_block_digits: MAX_BLOCK_DIGITS,
            lookahead: LOOKAHEAD,
        })
    }

    pub fn with_caps(mut self, max_block_digits: usize, lookahead: usize) -> Self {
        self.max_block_digits = max_block_digits;
        self.lookahead = lookahead;
        self
    }

    /// Whether blocks are laid out without `C`. Two-sided requests with
    /// `γ > 5` use the one-sided layout, which satisfies both conditions.
    pub fn two_sided_blocks(&self) -> bool {
        self.mode == Mode::TwoSided && self.gamma <= QuadraticSurd::from(5)
    }

    pub fn block_spec(&self) -> BlockSpec {
        if self.two_sided_blocks() {
            return BlockSpec { c_digits: Vec::new(), separator: self.c, parity: None, min_size: TWO_SIDED_MIN + 1 };
        }
        let parity = match self.regime {
            Regime::Repr5 => Some(0),
            Regime::Repr4 | Regime::Repr6 => Some(1),
        };
        BlockSpec { c_digits: c_block(self.regime, self.n0), separator: self.c, parity, min_size: 1 }
    }

    /// `F_K` containing every digit of `α`.
    pub fn tail_system(&self) -> DigitSystem {
        let k = if self.two_sided_blocks() { 4 } else { tail_digit_bound(self.regime, self.c) };
        DigitSystem::bounded(k).expect("nonempty alphabet")
    }

    /// `γ − ε`.
    pub fn lower_line(&self) -> QuadraticSurd {
        self.gamma.add_rational(&-&self.epsilon)
    }
}

/// Half the gap between `γ` and `3 + [0; 1, 4, (1,3)^∞] + [0; (1,3)^∞] =
/// 2 + 4√21/7`, but at least 1/1000.
pub fn two_sided_margin(gamma: &QuadraticSurd) -> BigRational {
    let bound = QuadraticSurd::from(2) + QuadraticSurd::sqrt(21u32).mul_rational(&rat(4, 7));
    let gap = gamma - &bound;
    let half = if gap.is_positive() { positive_lower_bound(&gap) / int(2) } else { BigRational::zero() };
    half.max(rat(1, 1000))
}

/// One emitted block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRecord {
    /// 1-based block number.
    pub block: usize,
    pub m: usize,
    pub n: usize,
    /// Marked index `k_i` (1-based digit index of the separator).
    pub k: usize,
    /// Index of the first digit belonging to this block, `C` included.
    pub start: usize,
    pub q_k: BigInt,
    /// Enclosure of `α*_{k-1} − μ`.
    pub diff_mu: RationalInterval,
    /// Upper bound of `|[0; c_1, …, c_n, rest] − ν|`.
    pub diff_nu_hi: BigRational,
}

/// The growing digit stream of `α`.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub digits: Vec<u64>,
    table: ConvergentTable,
    pub blocks: Vec<BlockRecord>,
}

impl Default for ConstructionState {
    fn default() -> Self {
        Self::new()
    }
}

impl ConstructionState {
    pub fn new() -> Self {
        ConstructionState { digits: Vec::new(), table: ConvergentTable::new(&BigInt::zero(), &[]), blocks: Vec::new() }
    }

    pub fn push(&mut self, d: u64) {
        self.digits.push(d);
        self.table.push(d);
    }

    pub fn extend(&mut self, ds: &[u64]) {
        for &d in ds {
            self.push(d);
        }
    }

    /// `q_i` for `-1 ≤ i ≤ N`.
    pub fn q(&self, i: usize) -> &BigInt {
        self.table.q(i as isize)
    }

    pub fn marked(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.k).collect()
    }
}

type Mat = [[BigInt; 2]; 2];

/// `A(d)·R` with `A(d) = [[d, 1], [1, 0]]`.
fn left_mul(d: u64, r: &Mat) -> Mat {
    let d = BigInt::from(d);
    [[&d * &r[0][0] + &r[1][0], &d * &r[0][1] + &r[1][1]], [r[0][0].clone(), r[0][1].clone()]]
}

/// Denominators `(q_{k-1}, q_{k-2})` after appending a block with matrix `r`
/// to the prefix map `m`.
fn block_denominators(m: &Mobius, r: &Mat) -> (BigInt, BigInt) {
    let q1 = &m.q * &r[0][0] + &m.q_prev * &r[1][0];
    let q2 = &m.q * &r[0][1] + &m.q_prev * &r[1][1];
    (q1, q2)
}

enum Verdict {
    Pass,
    Fail,
}

/// Decides `α* − μ ∈ (0, t)` (or `0 < |α* − μ| < t`), refining `μ` until the
/// verdict is settled. Works on unreduced fractions: the operands have as
/// many bits as `q_k²` and gcd normalisation would dominate the scan.
fn check_mu(
    star: &Frac,
    t: &Frac,
    two_sided: bool,
    rep: &mut GammaRepresentation,
    depth_cap: usize,
) -> Result<(Verdict, Frac, Frac)> {
    let mut width = Frac { n: t.n.clone(), d: &t.d * REFINE_FACTOR };
    loop {
        let (mu_lo, mu_hi) = rep.mu_bounds(&BigRational::new_raw(width.n.clone(), width.d.clone()))?;
        let lo = star.sub(&mu_hi);
        let hi = star.sub(&mu_lo);
        let (mag_lo, mag_hi) = if !two_sided || lo.n.is_positive() {
            (lo.clone(), hi.clone())
        } else if hi.n.is_negative() {
            (neg(&hi), neg(&lo))
        } else {
            let zero = Frac { n: BigInt::zero(), d: BigInt::one() };
            let top = if neg(&lo).cmp(&hi) == Ordering::Greater { neg(&lo) } else { hi.clone() };
            (zero, top)
        };
        if two_sided {
            if mag_lo.cmp(t) != Ordering::Less {
                return Ok((Verdict::Fail, lo, hi));
            }
            if mag_lo.n.is_positive() && mag_hi.cmp(t) == Ordering::Less {
                return Ok((Verdict::Pass, lo, hi));
            }
        } else {
            if !hi.n.is_positive() || lo.cmp(t) != Ordering::Less {
                return Ok((Verdict::Fail, lo, hi));
            }
            if lo.n.is_positive() && hi.cmp(t) == Ordering::Less {
                return Ok((Verdict::Pass, lo, hi));
            }
        }
        if rep.prefixes().0.len() > depth_cap {
            return Err(Error::Undecidable { what: "sign and size of alpha*_{k-1} - mu".into(), lookahead: depth_cap });
        }
        width.d *= REFINE_FACTOR;
    }
}

fn neg(f: &Frac) -> Frac {
    Frac { n: -&f.n, d: f.d.clone() }
}

fn to_interval(lo: &Frac, hi: &Frac) -> RationalInterval {
    RationalInterval::new(lo.to_rational(), hi.to_rational()).expect("ordered")
}

/// Appends `C` (one-sided) and the next block `B^{n_i}_{m_i}`.
pub fn next_block(
    state: &mut ConstructionState,
    params: &ConstructionParams,
    rep: &mut GammaRepresentation,
) -> Result<()> {
    if rep.regime() != params.regime || rep.c() != params.c || rep.gamma() != &params.gamma {
        return Err(Error::InvalidParams("representation does not match the parameters".into()));
    }
    let spec = params.block_spec();
    let two_sided = params.two_sided_blocks();
    let block = state.blocks.len() + 1;
    let start = state.digits.len() + 1;
    let (prev_m, prev_n) = state.blocks.last().map_or((0, 0), |b| (b.m, b.n));
    state.extend(&spec.c_digits);

    let prefix_len = state.digits.len();
    let m_map = state.table.mobius(prefix_len);
    let sep = BigInt::from(spec.separator);
    let first_m = spec.next_size(prev_m);
    let step = spec.size_step();

    // R = A(b_m)···A(b_1), grown by left multiplication.
    let mut r: Mat = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    let mut have = 0usize;
    let mut chosen = None;
    let mut m = first_m;
    let mut last_report = None;
    let mut exhausted = None;
    while m <= params.max_block_digits {
        let b = match rep.mu_digits(m) {
            Ok(b) => b,
            Err(e @ Error::DepthExceeded { .. }) => {
                exhausted = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        while have < m {
            r = left_mul(b[have], &r);
            have += 1;
        }
        let (q1, q2) = block_denominators(&m_map, &r);
        let q_k = &sep * &q1 + &q2;
        let star = Frac { n: q2, d: q1 };
        let pad = params.pad.eval(&q_k)?;
        let t = Frac { n: pad.numer().clone(), d: pad.denom() * &q_k * &q_k * 2u32 };
        let cap = m + params.lookahead;
        match check_mu(&star, &t, two_sided, rep, cap) {
            Ok((Verdict::Pass, lo, hi)) => {
                chosen = Some((m, b, q_k, to_interval(&lo, &hi)));
                break;
            }
            Ok((Verdict::Fail, lo, hi)) => last_report = Some((m, lo, hi, t)),
            Err(e @ Error::DepthExceeded { .. }) => {
                exhausted = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
        m += step;
    }
    let Some((m, b, q_k, diff_mu)) = chosen else {
        let mut detail = match last_report {
            Some((m, _, hi, t)) if !hi.n.is_positive() => {
                format!(
                    "at m = {m}: alpha*_(k-1) - mu <= 0 (upper bound {}); pad(q_k)/(2 q_k^2) is {}",
                    short_sci(&hi),
                    short_sci(&t)
                )
            }
            Some((m, lo, _, t)) => format!(
                "at m = {m}: |alpha*_(k-1) - mu| is at least {} but pad(q_k)/(2 q_k^2) is only {}",
                short_sci(&lo),
                short_sci(&t)
            ),
            None => "no admissible m below the cap".into(),
        };
        if let Some(e) = exhausted {
            detail = format!("{detail}; stopped early: {e}");
        }
        return Err(Error::PadTooSlow { block, cap: params.max_block_digits, detail });
    };
    for i in (0..m).rev() {
        state.push(b[i]);
    }
    state.push(spec.separator);
    let k = state.digits.len();
    debug_assert_eq!(state.q(k), &q_k);

    let scale = if two_sided { diff_mu.abs().lo().clone() } else { diff_mu.lo().clone() };
    let system = params.tail_system();
    // Whatever follows c_n: C then free digits, or free digits.
    let rest = if spec.c_digits.is_empty() {
        system.tail_enclosure(None).clone()
    } else {
        let after = system.tail_enclosure(spec.c_digits.last().copied());
        Mobius::from_digits(&BigInt::zero(), &spec.c_digits).apply_interval(after)
    };
    let mut n = spec.next_size(prev_n);
    let mut c_map = Mobius::identity();
    let mut have = 0usize;
    let nu_width = &scale / int(REFINE_FACTOR);
    let nu = rep.nu_enclosure(&nu_width)?.to_interval(64 + scale.denom().bits() as u32 + 64);
    loop {
        if n > params.max_block_digits {
            return Err(Error::PadTooSlow {
                block,
                cap: params.max_block_digits,
                detail: "no n brings [0; c_1, ..., c_n, ...] within alpha*_(k-1) - mu of nu".into(),
            });
        }
        let c = rep.nu_digits(n)?;
        while have < n {
            c_map.push(c[have]);
            have += 1;
        }
        let tail = c_map.apply_interval(&rest);
        let gap_hi = (tail.hi() - nu.lo()).max(nu.hi() - tail.lo());
        if gap_hi < scale {
            state.extend(&c);
            state.blocks.push(BlockRecord { block, m, n, k, start, q_k, diff_mu, diff_nu_hi: gap_hi });
            return Ok(());
        }
        n += spec.size_step();
    }
}

fn short_sci(x: &Frac) -> String {
    if x.n.is_zero() {
        return "0".into();
    }
    // Order of magnitude from bit lengths, good to about one decade.
    let bits = x.n.bits() as i64 - x.d.bits() as i64;
    let decades = (bits * 30103 + 50000 * bits.signum()) / 100000;
    let sign = if x.n.is_negative() { "-" } else { "" };
    format!("{sign}about 1e{decades}")
}

/// Classification of a certified index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryClass {
    /// `γ < λ_n < γ + ϖ(q_n)/q_n²`.
    MarkedAbove,
    /// `|λ_n − γ| < ϖ(q_n)/q_n²`.
    MarkedBand,
    /// `λ_n < γ − ε`.
    BelowMargin,
}

impl EntryClass {
    pub fn name(self) -> &'static str {
        match self {
            EntryClass::MarkedAbove => "marked_above",
            EntryClass::MarkedBand => "marked_band",
            EntryClass::BelowMargin => "below_margin",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "marked_above" => Ok(EntryClass::MarkedAbove),
            "marked_band" => Ok(EntryClass::MarkedBand),
            "below_margin" => Ok(EntryClass::BelowMargin),
            _ => Err(Error::InvalidParams(format!("unknown certificate class {s:?}"))),
        }
    }

    /// Whether `lambda` proves this class at `q` with the given parameters.
    pub fn holds(
        self,
        lambda: &RationalInterval,
        q: &BigInt,
        gamma: &QuadraticSurd,
        pad: &PadFunction,
        epsilon: &BigRational,
    ) -> Result<bool> {
        Ok(match self {
            EntryClass::BelowMargin => gamma.add_rational(&-epsilon).cmp_rational(lambda.hi()) == Ordering::Greater,
            EntryClass::MarkedAbove => {
                let band = pad.eval(q)? / int(q * q);
                gamma.cmp_rational(lambda.lo()) == Ordering::Less
                    && gamma.add_rational(&band).cmp_rational(lambda.hi()) == Ordering::Greater
            }
            EntryClass::MarkedBand => {
                let band = pad.eval(q)? / int(q * q);
                gamma.add_rational(&band).cmp_rational(lambda.hi()) == Ordering::Greater
                    && gamma.add_rational(&-band).cmp_rational(lambda.lo()) == Ordering::Less
            }
        })
    }
}

impl fmt::Display for EntryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateEntry {
    pub n: usize,
    pub q_n: BigInt,
    pub lambda: RationalInterval,
    pub class: EntryClass,
    /// Block the index belongs to; `blocks + 1` for the trailing `C`.
    pub block: usize,
}

/// Every decided `λ_n` of an emitted prefix with its inequality class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub gamma: QuadraticSurd,
    pub pad: PadFunction,
    pub mode: Mode,
    pub regime: Regime,
    pub c: u64,
    pub n0: usize,
    pub epsilon: BigRational,
    /// Name of the digit system bounding the unknown tail.
    pub tail_system: String,
    pub blocks: Vec<BlockRecord>,
    pub entries: Vec<CertificateEntry>,
    /// Indices whose `λ_n` fits no class at the current precision.
    pub undecided: Vec<usize>,
    /// Largest `q_n` for which the strengthened inequality at `p_n/q_n` is
    /// not ruled out by `λ_{n+1}`.
    pub threshold_q: Option<BigInt>,
}

impl Certificate {
    pub fn marked(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.k).collect()
    }

    pub fn marked_class(&self) -> EntryClass {
        if self.mode == Mode::TwoSided && self.gamma <= QuadraticSurd::from(5) {
            EntryClass::MarkedBand
        } else {
            EntryClass::MarkedAbove
        }
    }
}

/// Enclosure of `λ_n` given `α*_{n-1}`, trying a short lookahead first.
pub(crate) fn lambda_for(cf: &CfExpansion, table: &ConvergentTable, n: usize, full: bool) -> Result<RationalInterval> {
    let star = table.alpha_star(n - 1);
    let look = if full { usize::MAX } else { SHORT_LOOKAHEAD };
    let t = tail_value(cf, n, look)?.to_interval(crate::cf::REPORT_BITS);
    Ok(t.add_scalar(&(star + int(cf.digits[n - 1]))))
}

/// Block number of index `n` given the block records.
fn block_of(blocks: &[BlockRecord], n: usize) -> usize {
    blocks.iter().rev().find(|b| b.start <= n).map_or(0, |b| {
        let end = b.k + b.n;
        if n <= end {
            b.block
        } else {
            b.block + 1
        }
    })
}

/// Largest `q_n` whose strengthened inequality is not excluded by `λ_{n+1}`.
pub(crate) fn strengthened_threshold(
    cf: &CfExpansion,
    table: &ConvergentTable,
    lambdas: &[RationalInterval],
    gamma: &QuadraticSurd,
    pad: &PadFunction,
) -> Result<Option<BigInt>> {
    let mut out = None;
    // lambdas[n] is λ_{n+1}
    for (n, next) in lambdas.iter().enumerate().take(cf.digits.len()) {
        let q = table.q(n as isize);
        let factor = BigRational::one() - pad.eval(q)? / int(q * q);
        let ruled_out = !factor.is_positive() || gamma.cmp_rational(&(next.hi() * &factor)) != Ordering::Less;
        if !ruled_out {
            out = Some(q.clone());
        }
    }
    Ok(out)
}

/// Computes every `λ_n` of `cf` from scratch and classifies it.
pub fn certify(cf: &CfExpansion, params: &ConstructionParams, blocks: &[BlockRecord]) -> Result<Certificate> {
    let table = ConvergentTable::new(&BigInt::zero(), &cf.digits);
    let marked_class = if params.two_sided_blocks() { EntryClass::MarkedBand } else { EntryClass::MarkedAbove };
    let marked: Vec<usize> = blocks.iter().map(|b| b.k).collect();
    let mut entries = Vec::new();
    let mut undecided = Vec::new();
    let mut lambdas = Vec::with_capacity(cf.digits.len());
    for n in 1..=cf.digits.len() {
        let q = table.q(n as isize);
        let is_marked = marked.contains(&n);
        let class = if is_marked { marked_class } else { EntryClass::BelowMargin };
        let mut lambda = lambda_for(cf, &table, n, is_marked)?;
        let mut ok = class.holds(&lambda, q, &params.gamma, &params.pad, &params.epsilon)?;
        if !ok && !is_marked {
            lambda = lambda_for(cf, &table, n, true)?;
            ok = class.holds(&lambda, q, &params.gamma, &params.pad, &params.epsilon)?;
        }
        if ok {
            entries.push(CertificateEntry {
                n,
                q_n: q.clone(),
                lambda: lambda.clone(),
                class,
                block: block_of(blocks, n),
            });
        } else {
            undecided.push(n);
        }
        lambdas.push(lambda);
    }
    let threshold_q = strengthened_threshold(cf, &table, &lambdas, &params.gamma, &params.pad)?;
    Ok(Certificate {
        gamma: params.gamma.clone(),
        pad: params.pad.clone(),
        mode: params.mode,
        regime: params.regime,
        c: params.c,
        n0: params.n0,
        epsilon: params.epsilon.clone(),
        tail_system: params.tail_system().name().into(),
        blocks: blocks.to_vec(),
        entries,
        undecided,
        threshold_q,
    })
}

/// Emits `blocks` blocks (plus the trailing `C` in one-sided layout) and
/// certifies the prefix.
pub fn build_alpha(
    params: &ConstructionParams,
    rep: &mut GammaRepresentation,
    blocks: usize,
) -> Result<(CfExpansion, Certificate)> {
    let mut state = ConstructionState::new();
    for _ in 0..blocks {
        next_block(&mut state, params, rep)?;
    }
    state.extend(&params.block_spec().c_digits);
    let cf = CfExpansion::new(0, state.digits.clone(), Tail::System(params.tail_system()))?;
    let cert = certify(&cf, params, &state.blocks)?;
    for b in &state.blocks {
        if cert.undecided.contains(&b.k) {
            return Err(Error::InvariantViolated { index: b.k, detail: "marked index failed to certify".into() });
        }
    }
    Ok((cf, cert))
}
