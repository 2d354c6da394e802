//! Crate-wide error type.
//!
//! Errors fall into three bands that the CLI maps onto exit codes:
//! domain/usage problems (bad inputs), mathematical failures (a verification
//! that ran to completion and came out false), and internal errors
//! (invariants of the implementation itself broken, e.g. the two normality
//! oracles disagreeing).

use num_rational::BigRational;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u64, right: u64 },

    #[error("level {sub} does not divide {level}")]
    NotDivisor { sub: u64, level: u64 },

    #[error("{t} is not invertible modulo {level}")]
    NotCoprime { t: u64, level: u64 },

    #[error("division by zero in Q(zeta_{level})")]
    DivisionByZero { level: u64 },

    #[error("level {level} is not admitted here: {reason}")]
    DegenerateLevel { level: u64, reason: &'static str },

    #[error("t = {t} must be 4 or an odd prime congruent to 3 mod 4")]
    QuadraticShape { t: u64 },

    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    EnumerationBound { order: usize, bound: usize },

    #[error("coordinate vector has length {got}, expected {expected}")]
    CoordinateLength { got: usize, expected: usize },

    #[error("element is not fixed by complex conjugation")]
    NotReal,

    #[error("ratio hypothesis violated: {detail}")]
    HypothesisViolated { detail: String },

    #[error("precision exhausted deciding a sign (working bits > {max_bits})")]
    PrecisionExhausted { max_bits: u32 },

    #[error("normality oracles disagree on subgroup {subgroup:?} (internal error)")]
    OracleDisagreement { subgroup: Vec<u64> },

    #[error("disjointness violated: degrees {d1} * {d2} != compositum degree {compositum}")]
    DisjointnessViolated { d1: usize, d2: usize, compositum: usize },

    #[error("index ({r1}, {r2}) reduces into Z^2")]
    IntegralIndex { r1: BigRational, r2: BigRational },

    #[error("index ({r1}, {r2}) does not lie in (1/{level})Z^2")]
    IndexDenominator { r1: BigRational, r2: BigRational, level: u64 },

    #[error("index ({r1}, {r2}) is not in canonical form")]
    NonCanonicalIndex { r1: BigRational, r2: BigRational },

    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },

    #[error("q-order of the zero series is indeterminate")]
    IndeterminateOrder,

    #[error("series truncation {truncation} too small to resolve the leading term")]
    TruncationTooSmall { truncation: BigRational },

    #[error("q-expansions differ first at exponent {exponent}")]
    SeriesMismatch { exponent: BigRational },

    #[error("valuation inequality is not strict at N = {n}, t = {t}")]
    ValuationNotStrict { n: u64, t: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error records a completed verification coming out
    /// false (as opposed to an ill-posed request or an internal defect).
    pub fn is_mathematical_failure(&self) -> bool {
        matches!(
            self,
            Error::HypothesisViolated { .. }
                | Error::DisjointnessViolated { .. }
                | Error::SeriesMismatch { .. }
                | Error::ValuationNotStrict { .. }
        )
    }
}
