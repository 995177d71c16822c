//! Exact-arithmetic toolkit for numbers with prescribed exact approximation
//! behaviour.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! * [`cf`]: continued-fraction convergents, complete quotients, the
//!   two-sided quantities `λ_n` and Perron residuals, all as exact values or
//!   rational enclosures;
//! * [`surd`] and [`interval`]: quadratic surds with exact total ordering and
//!   rational interval enclosures;
//! * [`digits`] and [`cantor`]: digit-restricted continued-fraction Cantor
//!   sets and the Hall-type subdivision that writes a target as `c + μ + ν`;
//! * [`construct`]: the block construction of a witness `α` together with a
//!   re-checkable certificate;
//! * [`verify`]: brute-force enumeration of rational solutions, the
//!   convergent (Perron) predicate, Lagrange-constant estimates and
//!   certificate re-checking;
//! * [`spectrum`]: Markoff numbers, discrete Lagrange values and named
//!   constants.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cantor;
pub mod cf;
pub mod construct;
pub mod digits;
pub mod error;
pub mod interval;
pub mod pad;
pub mod spectrum;
pub mod surd;
pub mod verify;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Exact rational number with unbounded numerator and denominator.
pub type ExactRational = BigRational;

pub use crate::cantor::{decompose, represent_gamma, Cylinder, Decomposer, Decomposition, GammaRepresentation, Regime};
pub use crate::cf::{CfExpansion, Tail};
pub use crate::construct::{
    build_alpha, find_n0, BlockRecord, BlockSpec, Certificate, CertificateEntry, ConstructionParams, ConstructionState,
    EntryClass, Mode,
};
pub use crate::digits::{DigitSystem, EventuallyPeriodic};
pub use crate::error::Error;
pub use crate::interval::{Enclosure, RationalInterval};
pub use crate::pad::PadFunction;
pub use crate::spectrum::{constants, lagrange_value, markoff_numbers, MarkoffTriple, NamedConstant};
pub use crate::surd::QuadraticSurd;
pub use crate::verify::{
    convergent_predicate, enumerate_solutions, lagrange_estimate, recheck_certificate, Decision, Sign, SolutionReport,
};
