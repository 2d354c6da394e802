//! Rigorous enclosures for embeddings of cyclotomic elements.
//!
//! Intervals carry exact rational endpoints (dyadic after rounding) and are
//! only ever widened: every operation rounds outward, so a returned interval
//! always contains the true value. pi comes from a Machin enclosure; cos and
//! sin of rational angle fractions come from Taylor partial sums on the
//! interval, with the tail bounded by a geometric majorant. Comparisons that
//! an enclosure cannot settle are escalated by the caller (doubling the
//! working precision, or falling back to an exact algebraic test).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::arith::gcd_u64;
use crate::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};
use crate::rational::{
    ceil_to_dyadic, floor_to_dyadic, fractional_part, magnitude_bits, rat, Rational,
};

// ---------------------------------------------------------------------------
// real intervals
// ---------------------------------------------------------------------------

/// A closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Rational,
    hi: Rational,
}

impl RealInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "inverted interval");
        RealInterval { lo, hi }
    }

    pub fn point(value: Rational) -> Self {
        RealInterval { lo: value.clone(), hi: value }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.lo <= *value && *value <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, other: &Self) -> Self {
        RealInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RealInterval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        RealInterval { lo, hi }
    }

    /// Multiply by an exact rational.
    pub fn scale(&self, by: &Rational) -> Self {
        if by.is_negative() {
            RealInterval { lo: &self.hi * by, hi: &self.lo * by }
        } else {
            RealInterval { lo: &self.lo * by, hi: &self.hi * by }
        }
    }

    /// Outward rounding onto the grid `2^-bits` (exact endpoints stay put).
    pub fn rounded(&self, bits: u32) -> Self {
        RealInterval {
            lo: floor_to_dyadic(&self.lo, bits),
            hi: ceil_to_dyadic(&self.hi, bits),
        }
    }

    /// Enclosure of `|value|` as (lower, upper).
    pub fn abs_bounds(&self) -> (Rational, Rational) {
        let upper = self.lo.abs().max(self.hi.abs());
        let lower = if self.contains_zero() {
            Rational::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        };
        (lower, upper)
    }

    /// `Some(sign)` when every point of the interval has that sign.
    pub fn certain_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// pi and circular functions
// ---------------------------------------------------------------------------

fn two_pow_inverse(bits: u32) -> Rational {
    Rational::new(num_bigint::BigInt::one(), num_bigint::BigInt::one() << bits)
}

/// `atan(1/x)` bracketed by alternating partial sums; error at most the
/// first omitted term.
fn atan_inv_enclosure(x: i64, bits: u32) -> RealInterval {
    let x2 = rat(x * x, 1);
    let mut power = rat(1, x);
    let mut sum = Rational::zero();
    let mut i: i64 = 0;
    let threshold = two_pow_inverse(bits);
    loop {
        let term = &power / rat(2 * i + 1, 1);
        if term < threshold {
            // `term` bounds the whole omitted alternating tail
            return RealInterval::new(&sum - &term, &sum + &term);
        }
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &x2;
        i += 1;
    }
}

/// Cached enclosure of pi at a working precision, dyadically rounded.
fn pi_enclosure(bits: u32) -> RealInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, RealInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&bits) {
        return v.clone();
    }
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_inv_enclosure(5, bits + 8).scale(&rat(16, 1));
    let b = atan_inv_enclosure(239, bits + 8).scale(&rat(4, 1));
    let pi = a.sub(&b).rounded(bits + 4);
    cache.lock().unwrap().insert(bits, pi.clone());
    pi
}

/// Taylor enclosure of cos (or sin) on an interval `x` with `|x| <= 3.3`,
/// rounding every step outward at `bits` working bits.
fn circular_series(x: &RealInterval, bits: u32, sin: bool) -> RealInterval {
    let threshold = two_pow_inverse(bits + 4);
    let x_sq = x.mul(x).rounded(bits + 8);
    let mut term = if sin { x.clone() } else { RealInterval::point(Rational::one()) };
    let mut sum = term.clone();
    let mut k: i64 = 1;
    loop {
        let denom = if sin {
            rat((2 * k) * (2 * k + 1), 1)
        } else {
            rat((2 * k - 1) * (2 * k), 1)
        };
        term = term.mul(&x_sq).scale(&(Rational::one() / denom)).rounded(bits + 8);
        let (_, term_mag) = term.abs_bounds();
        if k % 2 == 1 {
            sum = sum.sub(&term);
        } else {
            sum = sum.add(&term);
        }
        sum = sum.rounded(bits + 8);
        // for |x| <= 3.3 and k >= 3 the term ratio is <= 11/56, so the
        // dropped tail is below (11/45) of the last included term; 11/4 is
        // a comfortable majorant
        if k >= 3 && term_mag < threshold {
            let slack = &term_mag * rat(11, 4);
            let pad = RealInterval::new(-slack.clone(), slack);
            return sum.add(&pad);
        }
        k += 1;
    }
}

/// Rigorous enclosures of `(cos(2 pi f), sin(2 pi f))` for rational `f`,
/// outward-rounded to `2^-precision`. Angles that have exact rational
/// cos/sin on the axes come back as zero-width points.
pub fn cos_sin_2pi(fraction: &Rational, precision: u32) -> (RealInterval, RealInterval) {
    let u = fractional_part(fraction);
    // exact quarter turns
    let quarter: Option<(i64, i64)> = if u.is_zero() {
        Some((1, 0))
    } else if u == rat(1, 4) {
        Some((0, 1))
    } else if u == rat(1, 2) {
        Some((-1, 0))
    } else if u == rat(3, 4) {
        Some((0, -1))
    } else {
        None
    };
    if let Some((c, s)) = quarter {
        return (
            RealInterval::point(rat(c, 1)),
            RealInterval::point(rat(s, 1)),
        );
    }
    let t = if u > rat(1, 2) { &u - Rational::one() } else { u };
    let w = precision + 24;
    let pi = pi_enclosure(w);
    let two_t = &t + &t;
    let theta = pi.scale(&two_t); // |theta| <= pi, exact endpoints then rounded below
    let theta = theta.rounded(w + 8);
    let cos = circular_series(&theta, w, false).rounded(precision);
    let sin = circular_series(&theta, w, true).rounded(precision);
    (cos, sin)
}

// ---------------------------------------------------------------------------
// complex enclosures of embeddings
// ---------------------------------------------------------------------------

/// A rectangle `[re] + i [im]` guaranteed to contain a complex value,
/// together with the working precision that produced it.
#[derive(Clone, Debug)]
pub struct ComplexInterval {
    re: RealInterval,
    im: RealInterval,
    precision: u32,
}

impl ComplexInterval {
    pub fn re(&self) -> &RealInterval {
        &self.re
    }

    pub fn im(&self) -> &RealInterval {
        &self.im
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Enclosure of `|z|^2 = re^2 + im^2`.
    pub fn abs_sq(&self) -> RealInterval {
        let (rl, rh) = self.re.abs_bounds();
        let (il, ih) = self.im.abs_bounds();
        RealInterval::new(&rl * &rl + &il * &il, &rh * &rh + &ih * &ih)
    }

    /// Enclosure of `|z|` is not needed exactly; comparisons use `abs_sq`.
    /// The wider of the two box widths, the usual convergence gauge.
    pub fn width(&self) -> Rational {
        self.re.width().max(self.im.width())
    }

    pub fn contains(&self, re: &Rational, im: &Rational) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }
}

impl CyclotomicElement {
    /// Enclose the image of the element under `zeta -> exp(2 pi i s / l)`,
    /// with gcd(s, l) = 1. The rectangle is guaranteed to contain the true
    /// value; rational elements on the dyadic grid come back with zero
    /// width.
    pub fn numeric_eval(&self, precision: u32, embedding: u64) -> Result<ComplexInterval> {
        let l = self.level();
        if l > 1 && gcd_u64(embedding % l, l) != 1 {
            return Err(Error::NotCoprime { t: embedding % l, level: l });
        }
        // pad the working precision by the coordinate magnitude so the final
        // rounded width is governed by `precision` alone
        let coord_mag: Rational = self
            .coords()
            .iter()
            .map(|c| c.abs())
            .fold(Rational::one(), |a, b| a + b);
        let w = precision + 8 + magnitude_bits(&coord_mag);
        let mut re_acc = RealInterval::point(Rational::zero());
        let mut im_acc = RealInterval::point(Rational::zero());
        for (j, c) in self.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = if l == 1 {
                Rational::zero()
            } else {
                Rational::new(
                    (embedding % l * j as u64 % l).into(),
                    l.into(),
                )
            };
            let (cos, sin) = cos_sin_2pi(&angle, w);
            re_acc = re_acc.add(&cos.scale(c));
            im_acc = im_acc.add(&sin.scale(c));
        }
        Ok(ComplexInterval {
            re: re_acc.rounded(precision),
            im: im_acc.rounded(precision),
            precision,
        })
    }
}
