//! Exact rational scalars.
//!
//! Everything in this crate computes over `Rational` = `Ratio<BigInt>`,
//! which keeps values in lowest terms with a positive denominator after
//! every operation. No floating point enters any verified statement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Fractional part `<x> = x - floor(x)`, always in `[0, 1)`.
pub fn fractional_part(x: &Rational) -> Rational {
    x - x.floor()
}

/// Second Bernoulli polynomial `B2(x) = x^2 - x + 1/6`.
pub fn bernoulli2(x: &Rational) -> Rational {
    x * x - x + rat(1, 6)
}

/// True iff `x = a / 2^k` for some integer `a`, i.e. x is dyadic.
pub fn is_dyadic(x: &Rational) -> bool {
    let mut d = x.denom().clone();
    while d.is_even() {
        d >>= 1;
    }
    d.is_one()
}

use num_integer::Integer;

/// Round `x` down to the grid `2^-bits` (exact when `x` is on the grid).
pub fn floor_to_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = (x * Rational::from(scale.clone())).floor();
    scaled / Rational::from(scale)
}

/// Round `x` up to the grid `2^-bits` (exact when `x` is on the grid).
pub fn ceil_to_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = (x * Rational::from(scale.clone())).ceil();
    scaled / Rational::from(scale)
}

/// Smallest `k >= 0` with `|x| <= 2^k`; a coarse magnitude gauge used to
/// pad working precision.
pub fn magnitude_bits(x: &Rational) -> u32 {
    if x.is_zero() {
        return 0;
    }
    let a = x.abs();
    let (n, d) = (a.numer().bits(), a.denom().bits());
    if n > d {
        (n - d + 1) as u32
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractional_part_examples() {
        assert_eq!(fractional_part(&rat(-1, 3)), rat(2, 3));
        assert_eq!(fractional_part(&rat(7, 5)), rat(2, 5));
        assert_eq!(fractional_part(&rat_int(0)), rat_int(0));
        assert_eq!(fractional_part(&rat_int(-3)), rat_int(0));
    }

    #[test]
    fn bernoulli2_examples() {
        assert_eq!(bernoulli2(&rat_int(0)), rat(1, 6));
        assert_eq!(bernoulli2(&rat(1, 2)), rat(-1, 12));
        assert_eq!(bernoulli2(&rat_int(1)), rat(1, 6));
    }

    #[test]
    fn bernoulli2_reflection() {
        // B2(x) = B2(1 - x), the symmetry behind index negation
        for (n, d) in [(1i64, 3i64), (2, 7), (5, 8), (1, 12)] {
            let x = rat(n, d);
            assert_eq!(bernoulli2(&x), bernoulli2(&(rat_int(1) - &x)));
        }
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = rat(1, 3);
        let lo = floor_to_dyadic(&x, 8);
        let hi = ceil_to_dyadic(&x, 8);
        assert!(lo < x && x < hi);
        assert_eq!(&hi - &lo, rat(1, 256));
        // exact on the grid
        let y = rat(3, 8);
        assert_eq!(floor_to_dyadic(&y, 8), y);
        assert_eq!(ceil_to_dyadic(&y, 8), y);
    }
}
