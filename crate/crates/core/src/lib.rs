//! Exact verification of completely normal elements.
//!
//! The library constructs explicit elements of real cyclotomic fields
//! (powers of `cos(2 pi / l) + 1` and `cos(pi / l)`), composites with
//! quadratic Gauss sums, and the modular discriminant quotient
//! `Delta(tau) / Delta(N tau)`, then certifies complete normality by two
//! independent mechanisms:
//!
//! * an archimedean valuation criterion — a certified rational bound
//!   `B < 1` on conjugate ratios plus the exact inequality `B^m <= 1/n` —
//!   which *predicts* an exponent m, and
//! * exact algebraic oracles — character sums over every subgroup of the
//!   Galois group, cross-checked against the group determinant — which
//!   *decide* normality outright.
//!
//! Every verified statement is a statement about exact rationals; floating
//! point appears nowhere. Interval arithmetic (with outward rounding) only
//! ever steers searches, and every comparison it cannot settle falls back
//! to an exact algebraic test.

mod arith;
pub mod certificate;
pub mod criterion;
pub mod cyclotomic;
pub mod elements;
pub mod error;
pub mod galois;
pub mod interval;
pub mod modular;
pub mod normality;
pub mod qseries;
pub mod rational;
pub mod siegel;

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicElement};
pub use error::{Error, Result};
pub use rational::Rational;
