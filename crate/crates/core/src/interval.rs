//! Closed intervals with exact rational endpoints, and the [`Enclosure`]
//! type that is either an exact surd or such an interval.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::surd::{format_ratio, QuadraticSurd};

/// `[lo, hi]` with `lo ≤ hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Option<Self> {
        (lo <= hi).then_some(RationalInterval { lo, hi })
    }

    /// Interval spanned by two endpoints given in either order.
    pub fn hull_of(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            RationalInterval { lo: a, hi: b }
        } else {
            RationalInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: BigRational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_surd(&self, x: &QuadraticSurd) -> bool {
        x.cmp_rational(&self.lo) != Ordering::Less && x.cmp_rational(&self.hi) != Ordering::Greater
    }

    /// Strict containment of a surd in the interior.
    pub fn contains_surd_strictly(&self, x: &QuadraticSurd) -> bool {
        x.cmp_rational(&self.lo) == Ordering::Greater && x.cmp_rational(&self.hi) == Ordering::Less
    }

    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: self.lo.clone().min(other.lo.clone()), hi: self.hi.clone().max(other.hi.clone()) }
    }

    pub fn add_scalar(&self, r: &BigRational) -> RationalInterval {
        RationalInterval { lo: &self.lo + r, hi: &self.hi + r }
    }

    pub fn scale(&self, r: &BigRational) -> RationalInterval {
        RationalInterval::hull_of(&self.lo * r, &self.hi * r)
    }

    /// `{|x| : x ∈ self}`.
    pub fn abs(&self) -> RationalInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            RationalInterval { lo: -&self.hi, hi: -&self.lo }
        } else {
            RationalInterval { lo: BigRational::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        }
    }

    pub fn recip(&self) -> Result<RationalInterval> {
        if self.contains(&BigRational::zero()) {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalInterval::hull_of(self.lo.recip(), self.hi.recip()))
    }

    /// Three-way comparison that is `None` when the interval straddles `x`.
    pub fn cmp_surd(&self, x: &QuadraticSurd) -> Option<Ordering> {
        if x.cmp_rational(&self.hi) == Ordering::Greater {
            Some(Ordering::Less)
        } else if x.cmp_rational(&self.lo) == Ordering::Less {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: &RationalInterval) -> RationalInterval {
        let cands = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = cands.iter().min().expect("nonempty").clone();
        let hi = cands.iter().max().expect("nonempty").clone();
        RationalInterval { lo, hi }
    }
}

impl Neg for &RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        RationalInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_ratio(&self.lo), format_ratio(&self.hi))
    }
}

/// A real number known either exactly or through a rational enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enclosure {
    Exact(QuadraticSurd),
    Range(RationalInterval),
}

impl Enclosure {
    /// Rational interval view; exact irrational values are enclosed on a
    /// dyadic grid of spacing `2^-bits`.
    pub fn to_interval(&self, bits: u32) -> RationalInterval {
        match self {
            Enclosure::Exact(s) => s.enclose(bits),
            Enclosure::Range(iv) => iv.clone(),
        }
    }

    pub fn exact(&self) -> Option<&QuadraticSurd> {
        match self {
            Enclosure::Exact(s) => Some(s),
            Enclosure::Range(_) => None,
        }
    }

    /// Comparison with an exact value; `None` when undecided.
    pub fn cmp_surd(&self, x: &QuadraticSurd) -> Option<Ordering> {
        match self {
            Enclosure::Exact(s) => Some(s.cmp(x)),
            Enclosure::Range(iv) => iv.cmp_surd(x),
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Enclosure {
        match self {
            Enclosure::Exact(s) => Enclosure::Exact(s.add_rational(r)),
            Enclosure::Range(iv) => Enclosure::Range(iv.add_scalar(r)),
        }
    }

    pub fn width(&self) -> BigRational {
        match self {
            Enclosure::Exact(_) => BigRational::zero(),
            Enclosure::Range(iv) => iv.width(),
        }
    }
}
