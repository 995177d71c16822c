use alloc::string::String;
use core::fmt;

/// Errors produced by the exact-arithmetic routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An operation needed more partial quotients than the expansion holds.
    InsufficientDigits { needed: usize, available: usize },
    /// The tail after the known digits has no bound, so nothing can be enclosed.
    CannotEnclose { index: usize },
    /// A partial quotient was zero where a positive integer is required.
    InvalidDigit { position: usize, digit: u64 },
    /// A periodic tail was given an empty period.
    EmptyPeriod,
    /// The digit system is malformed (empty alphabet, dead ends, ...).
    InvalidSystem(String),
    /// A digit sequence uses a digit or transition the system forbids.
    IllegalDigits { position: usize, detail: String },
    /// The target of a decomposition lies outside the guaranteed interval.
    OutOfRange { target: String, lo: String, hi: String },
    /// The subdivision needed more digits than allowed.
    DepthExceeded { cap: usize },
    /// The subdivision exhausted every branch without covering the target.
    NoDecomposition { detail: String },
    /// The requested constant is outside the range the constructions support.
    UnsupportedGamma { gamma: String, reason: String },
    /// The padding function grows too slowly for the block-size cap.
    PadTooSlow { block: usize, cap: usize, detail: String },
    /// An inequality could not be decided inside the lookahead budget.
    Undecidable { what: String, lookahead: usize },
    /// A table padding function was evaluated outside its range.
    OutOfTable { q: String },
    /// A padding function specification is malformed or not admissible.
    InvalidPad(String),
    /// Malformed textual input; `position` is a byte offset.
    Parse { input: String, position: usize, message: String },
    /// Field operation on surds with unrelated radicands.
    IncompatibleRadicands,
    /// Division by zero in exact arithmetic.
    DivisionByZero,
    /// A construction invariant failed to certify.
    InvariantViolated { index: usize, detail: String },
    /// Construction parameters violate their invariants.
    InvalidParams(String),
    /// The integer is not a Markoff number.
    NotMarkoff(u64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InsufficientDigits { needed, available } => write!(
                f,
                "insufficient digits: need {needed}, have {available} (short by {})",
                needed.saturating_sub(*available)
            ),
            Error::CannotEnclose { index } => {
                write!(f, "cannot enclose value at index {index}: tail is unbounded")
            }
            Error::InvalidDigit { position, digit } => {
                write!(f, "partial quotient {digit} at position {position} is not positive")
            }
            Error::EmptyPeriod => f.write_str("periodic tail has an empty period"),
            Error::InvalidSystem(msg) => write!(f, "invalid digit system: {msg}"),
            Error::IllegalDigits { position, detail } => {
                write!(f, "illegal digit sequence at position {position}: {detail}")
            }
            Error::OutOfRange { target, lo, hi } => {
                write!(f, "target {target} lies outside the guaranteed interval [{lo}, {hi}]")
            }
            Error::DepthExceeded { cap } => {
                write!(f, "width goal not reached within the depth cap of {cap} digits")
            }
            Error::NoDecomposition { detail } => write!(f, "no decomposition found: {detail}"),
            Error::UnsupportedGamma { gamma, reason } => {
                write!(f, "unsupported gamma {gamma}: {reason}")
            }
            Error::PadTooSlow { block, cap, detail } => {
                write!(f, "padding function too slow for block {block} within {cap} digits: {detail}")
            }
            Error::Undecidable { what, lookahead } => {
                write!(f, "could not decide {what} within a lookahead of {lookahead} digits")
            }
            Error::OutOfTable { q } => write!(f, "padding table does not cover q = {q}"),
            Error::InvalidPad(msg) => write!(f, "invalid padding function: {msg}"),
            Error::Parse { input, position, message } => {
                write!(f, "parse error in {input:?} at byte {position}: {message}")
            }
            Error::IncompatibleRadicands => f.write_str("surd arithmetic across unrelated quadratic fields"),
            Error::DivisionByZero => f.write_str("division by zero"),
            Error::InvariantViolated { index, detail } => {
                write!(f, "construction invariant violated at index {index}: {detail}")
            }
            Error::InvalidParams(msg) => write!(f, "invalid construction parameters: {msg}"),
            Error::NotMarkoff(m) => write!(f, "{m} is not a Markoff number"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
