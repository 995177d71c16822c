//! Digit-restricted continued-fraction Cantor sets.
//!
//! A [`DigitSystem`] is an alphabet of allowed partial quotients plus a set
//! of forbidden ordered adjacent pairs. For every possible previous digit it
//! precomputes the extremal admissible tails `[0; d_1, d_2, …]` as exact
//! surds, and a rational enclosure of the tail set that is mapped into
//! itself by every admissible digit. The latter makes cylinder enclosures
//! nest exactly under refinement.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cf::periodic_value;
use crate::error::{Error, Result};
use crate::interval::RationalInterval;
use crate::surd::QuadraticSurd;

/// Bits of the dyadic grid used for rational tail enclosures.
pub const TAIL_BITS: u32 = 64;

/// Longest period the named systems are allowed to produce.
const NAMED_PERIOD_LIMIT: usize = 4;

/// The digit sequence `pre, period, period, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodic {
    pub pre: Vec<u64>,
    pub period: Vec<u64>,
}

impl EventuallyPeriodic {
    pub fn new(pre: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(EventuallyPeriodic { pre, period })
    }

    pub fn digit(&self, i: usize) -> u64 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<u64> {
        (0..len).map(|i| self.digit(i)).collect()
    }

    /// `[0; pre, period, period, …]`.
    pub fn value(&self) -> QuadraticSurd {
        periodic_value(&BigInt::from(0), &self.pre, &self.period)
    }
}

/// Extremal tails after a given previous digit, plus an invariant rational
/// enclosure of every admissible tail.
#[derive(Clone, Debug)]
pub struct TailBound {
    pub min_digits: EventuallyPeriodic,
    pub max_digits: EventuallyPeriodic,
    pub min: QuadraticSurd,
    pub max: QuadraticSurd,
    pub enclosure: RationalInterval,
}

/// Known sum interval `S + S` for a named system, with explicit digit pairs
/// realising each endpoint.
#[derive(Clone, Debug)]
pub struct GuaranteedSum {
    pub lo: QuadraticSurd,
    pub hi: QuadraticSurd,
    pub lo_pair: (EventuallyPeriodic, EventuallyPeriodic),
    pub hi_pair: (EventuallyPeriodic, EventuallyPeriodic),
}

struct SystemData {
    name: String,
    alphabet: Vec<u64>,
    forbidden: Vec<(u64, u64)>,
    start: TailBound,
    after: BTreeMap<u64, TailBound>,
    guaranteed: Option<GuaranteedSum>,
}

/// Allowed digits plus forbidden adjacent ordered pairs.
#[derive(Clone)]
pub struct DigitSystem(Arc<SystemData>);

impl fmt::Debug for DigitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigitSystem")
            .field("name", &self.0.name)
            .field("alphabet", &self.0.alphabet)
            .field("forbidden", &self.0.forbidden)
            .finish()
    }
}

impl PartialEq for DigitSystem {
    fn eq(&self, other: &Self) -> bool {
        self.0.alphabet == other.0.alphabet && self.0.forbidden == other.0.forbidden
    }
}

impl Eq for DigitSystem {}

impl DigitSystem {
    /// `F_k`: every partial quotient at most `k`.
    pub fn bounded(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSystem("F_0 has no digits".into()));
        }
        let sys = Self::build(format!("F{k}"), (1..=k).collect(), Vec::new(), true)?;
        let guaranteed = match k {
            4 => Some(sys.hull_guarantee()),
            3 => Some(freiman_f3()?),
            _ => None,
        };
        Ok(sys.with_guarantee(guaranteed))
    }

    /// Digits at most 4 with the ordered pairs (1,4) and (2,4) forbidden.
    pub fn freiman_judin() -> Self {
        let sys = Self::build("FJ".into(), alloc::vec![1, 2, 3, 4], alloc::vec![(1, 4), (2, 4)], true)
            .expect("Freiman-Judin system is well formed");
        let g = sys.hull_guarantee();
        sys.with_guarantee(Some(g))
    }

    /// A user-defined system without a known sum interval.
    pub fn custom(name: &str, alphabet: Vec<u64>, forbidden: Vec<(u64, u64)>) -> Result<Self> {
        Self::build(name.to_string(), alphabet, forbidden, false)
    }

    /// `F<k>` or `FJ`.
    pub fn from_name(name: &str) -> Result<Self> {
        if name == "FJ" {
            return Ok(Self::freiman_judin());
        }
        if let Some(k) = name.strip_prefix('F').and_then(|k| k.parse::<u64>().ok()) {
            return Self::bounded(k);
        }
        Err(Error::InvalidSystem(format!("unknown system name {name:?}")))
    }

    fn build(name: String, mut alphabet: Vec<u64>, mut forbidden: Vec<(u64, u64)>, named: bool) -> Result<Self> {
        alphabet.sort_unstable();
        alphabet.dedup();
        forbidden.sort_unstable();
        forbidden.dedup();
        if alphabet.is_empty() {
            return Err(Error::InvalidSystem("empty alphabet".into()));
        }
        if alphabet[0] == 0 {
            return Err(Error::InvalidSystem("digit 0 is not a partial quotient".into()));
        }
        for &(a, b) in &forbidden {
            if alphabet.binary_search(&a).is_err() || alphabet.binary_search(&b).is_err() {
                return Err(Error::InvalidSystem(format!("forbidden pair ({a},{b}) uses unknown digits")));
            }
        }
        for &d in &alphabet {
            if alphabet.iter().all(|&e| forbidden.binary_search(&(d, e)).is_ok()) {
                return Err(Error::InvalidSystem(format!("digit {d} has no allowed successor")));
            }
        }
        let successors = |prev: Option<u64>| -> Vec<u64> {
            alphabet
                .iter()
                .copied()
                .filter(|&e| prev.is_none_or(|p| forbidden.binary_search(&(p, e)).is_err()))
                .collect()
        };
        let limit = if named { NAMED_PERIOD_LIMIT } else { 2 * alphabet.len() };
        let mut keys: Vec<Option<u64>> = alloc::vec![None];
        keys.extend(alphabet.iter().map(|&d| Some(d)));
        let mut exact = Vec::new();
        for &key in &keys {
            let min_digits = extremal_sequence(&successors, key, true);
            let max_digits = extremal_sequence(&successors, key, false);
            for seq in [&min_digits, &max_digits] {
                if seq.period.len() > limit {
                    return Err(Error::InvalidSystem(format!(
                        "extremal tail period {} exceeds the limit {limit}",
                        seq.period.len()
                    )));
                }
            }
            let min = min_digits.value();
            let max = max_digits.value();
            exact.push((key, min_digits, max_digits, min, max));
        }
        let enclosures = invariant_enclosures(&exact, &successors)?;
        let mut start = None;
        let mut after = BTreeMap::new();
        for ((key, min_digits, max_digits, min, max), enclosure) in exact.into_iter().zip(enclosures) {
            let tb = TailBound { min_digits, max_digits, min, max, enclosure };
            match key {
                None => start = Some(tb),
                Some(d) => {
                    after.insert(d, tb);
                }
            }
        }
        Ok(DigitSystem(Arc::new(SystemData {
            name,
            alphabet,
            forbidden,
            start: start.expect("start key present"),
            after,
            guaranteed: None,
        })))
    }

    fn with_guarantee(self, guaranteed: Option<GuaranteedSum>) -> Self {
        let data = Arc::try_unwrap(self.0).unwrap_or_else(|_| unreachable!("fresh system"));
        DigitSystem(Arc::new(SystemData { guaranteed, ..data }))
    }

    fn hull_guarantee(&self) -> GuaranteedSum {
        let s = &self.0.start;
        GuaranteedSum {
            lo: &s.min + &s.min,
            hi: &s.max + &s.max,
            lo_pair: (s.min_digits.clone(), s.min_digits.clone()),
            hi_pair: (s.max_digits.clone(), s.max_digits.clone()),
        }
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn alphabet(&self) -> &[u64] {
        &self.0.alphabet
    }

    pub fn forbidden(&self) -> &[(u64, u64)] {
        &self.0.forbidden
    }

    pub fn max_digit(&self) -> u64 {
        *self.0.alphabet.last().expect("nonempty alphabet")
    }

    pub fn has_pair_restrictions(&self) -> bool {
        !self.0.forbidden.is_empty()
    }

    pub fn is_allowed(&self, d: u64) -> bool {
        self.0.alphabet.binary_search(&d).is_ok()
    }

    pub fn transition_allowed(&self, prev: u64, next: u64) -> bool {
        self.0.forbidden.binary_search(&(prev, next)).is_err()
    }

    /// Digits that may follow `prev` (any allowed digit when `prev` is
    /// `None` or outside the alphabet), in increasing order.
    pub fn successors(&self, prev: Option<u64>) -> Vec<u64> {
        let prev = prev.filter(|&p| self.is_allowed(p));
        self.0.alphabet.iter().copied().filter(|&e| prev.is_none_or(|p| self.transition_allowed(p, e))).collect()
    }

    /// Checks that `digits`, following `prev`, use only allowed digits and
    /// transitions.
    pub fn validate(&self, digits: &[u64], prev: Option<u64>) -> Result<()> {
        let mut last = prev.filter(|&p| self.is_allowed(p));
        for (i, &d) in digits.iter().enumerate() {
            if !self.is_allowed(d) {
                return Err(Error::IllegalDigits { position: i, detail: format!("digit {d} not in {}", self.0.name) });
            }
            if let Some(p) = last {
                if !self.transition_allowed(p, d) {
                    return Err(Error::IllegalDigits {
                        position: i,
                        detail: format!("pair ({p},{d}) forbidden in {}", self.0.name),
                    });
                }
            }
            last = Some(d);
        }
        Ok(())
    }

    /// Tail data for admissible tails following `prev`.
    pub fn tail_bound(&self, prev: Option<u64>) -> &TailBound {
        match prev.and_then(|p| self.0.after.get(&p)) {
            Some(tb) => tb,
            None => &self.0.start,
        }
    }

    /// Least and greatest admissible `[0; d_1, d_2, …]` after `prev`.
    pub fn extremal_tails(&self, prev: Option<u64>) -> (QuadraticSurd, QuadraticSurd) {
        let tb = self.tail_bound(prev);
        (tb.min.clone(), tb.max.clone())
    }

    pub fn tail_enclosure(&self, prev: Option<u64>) -> &RationalInterval {
        &self.tail_bound(prev).enclosure
    }

    pub fn guaranteed_sum(&self) -> Option<&GuaranteedSum> {
        self.0.guaranteed.as_ref()
    }
}

/// Greedy optimisation over the transition graph. Continued fractions are
/// ordered alternately lexicographically, so the minimum takes the largest
/// digit at odd positions and the smallest at even ones; every prefix
/// extends (no dead ends), so greedy is optimal.
fn extremal_sequence(
    successors: &impl Fn(Option<u64>) -> Vec<u64>,
    prev: Option<u64>,
    minimize: bool,
) -> EventuallyPeriodic {
    let mut seen: BTreeMap<(u64, bool), usize> = BTreeMap::new();
    let mut digits = Vec::new();
    let mut last = prev;
    let mut odd = true;
    loop {
        let succ = successors(last);
        let d = if minimize == odd { *succ.last().unwrap() } else { succ[0] };
        if let Some(&i) = seen.get(&(d, odd)) {
            let period = digits.split_off(i);
            return EventuallyPeriodic { pre: digits, period };
        }
        seen.insert((d, odd), digits.len());
        digits.push(d);
        last = Some(d);
        odd = !odd;
    }
}

type ExactTail = (Option<u64>, EventuallyPeriodic, EventuallyPeriodic, QuadraticSurd, QuadraticSurd);

/// Rational enclosures `[lo_p, hi_p]` of the tails after each key `p` such
/// that `1/(d + [lo_d, hi_d]) ⊆ [lo_p, hi_p]` for every admissible `d`.
fn invariant_enclosures(
    exact: &[ExactTail],
    successors: &impl Fn(Option<u64>) -> Vec<u64>,
) -> Result<Vec<RationalInterval>> {
    let grid = BigRational::new(BigInt::one(), BigInt::one() << TAIL_BITS as usize);
    let mut slack = &grid * BigRational::from_integer(BigInt::from(1 << 8));
    for _ in 0..64 {
        let ivs: Vec<RationalInterval> = exact
            .iter()
            .map(|(_, _, _, min, max)| {
                RationalInterval::new(min.enclose(TAIL_BITS).lo() - &slack, max.enclose(TAIL_BITS).hi() + &slack)
                    .expect("min ≤ max")
            })
            .collect();
        let lookup =
            |d: u64| exact.iter().position(|(k, ..)| *k == Some(d)).map(|i| &ivs[i]).expect("every digit has a key");
        let invariant = exact.iter().zip(&ivs).all(|((key, ..), outer)| {
            successors(*key).into_iter().all(|d| {
                let inner = lookup(d);
                let dr = BigRational::from_integer(BigInt::from(d));
                let lo = (&dr + inner.hi()).recip();
                let hi = (&dr + inner.lo()).recip();
                outer.lo() <= &lo && &hi <= outer.hi()
            })
        });
        if invariant {
            return Ok(ivs);
        }
        slack = &slack * BigRational::from_integer(BigInt::from(2));
    }
    Err(Error::InvalidSystem("could not find invariant tail enclosures".into()))
}

fn freiman_f3() -> Result<GuaranteedSum> {
    let ep = |pre: &[u64], period: &[u64]| EventuallyPeriodic::new(pre.to_vec(), period.to_vec());
    let lo_pair = (ep(&[], &[3, 1])?, ep(&[2], &[1, 3])?);
    let hi_pair = (ep(&[], &[1, 3])?, ep(&[1, 2], &[1, 3])?);
    Ok(GuaranteedSum {
        lo: &lo_pair.0.value() + &lo_pair.1.value(),
        hi: &hi_pair.0.value() + &hi_pair.1.value(),
        lo_pair,
        hi_pair,
    })
}
