//! Siegel functions as formal q-expansions: indices in (1/N)Z^2 - Z^2,
//! their canonical +-/mod Z^2 representatives, the SL2(Z) index action, and
//! the product expansion
//!
//!   g_(r1,r2) = -q^(B2(r1)/2) e^(pi i r2 (r1-1)) (1 - q^r1 e^(2 pi i r2))
//!               prod_{n>=1} (1 - q^(n+r1) e^(2 pi i r2))
//!                           (1 - q^(n-r1) e^(-2 pi i r2)).
//!
//! Coefficients live in Q(zeta_{2N^2}), the smallest cyclotomic field
//! containing every e^(pi i r2 (r1 - 1)) with r1, r2 in (1/N)Z. Only the
//! 12N-th powers are honest functions of +-(r1,r2) mod Z^2; raw expansions
//! of equivalent indices differ by root-of-unity factors, which is why the
//! raw (uncanonicalized) form is kept available for product identities.

pub use crate::rational::{bernoulli2, fractional_part};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegerMatrix2x2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMatrix2x2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::NotUnimodular { a, b, c, d, det });
        }
        Ok(IntegerMatrix2x2 { a, b, c, d })
    }

    pub fn identity() -> Self {
        IntegerMatrix2x2 { a: 1, b: 0, c: 0, d: 1 }
    }

    /// The Galois generator family of the modular verification:
    /// lower-triangular (1 0 / t 1).
    pub fn lower_shear(t: i64) -> Self {
        IntegerMatrix2x2 { a: 1, b: 0, c: t, d: 1 }
    }

    pub fn mul(&self, other: &IntegerMatrix2x2) -> Self {
        IntegerMatrix2x2 {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }
}

/// An index (r1, r2) in (1/N)Z^2 - Z^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiegelIndex {
    r1: Rational,
    r2: Rational,
    level: u64,
}

impl SiegelIndex {
    pub fn new(r1: Rational, r2: Rational, level: u64) -> Result<Self> {
        if level < 2 {
            return Err(Error::DegenerateLevel { level, reason: "index lattice needs N >= 2" });
        }
        let n = rat(level as i64, 1);
        if !(&r1 * &n).is_integer() || !(&r2 * &n).is_integer() {
            return Err(Error::IndexDenominator { r1, r2, level });
        }
        if r1.is_integer() && r2.is_integer() {
            return Err(Error::IntegralIndex { r1, r2 });
        }
        Ok(SiegelIndex { r1, r2, level })
    }

    pub fn r1(&self) -> &Rational {
        &self.r1
    }

    pub fn r2(&self) -> &Rational {
        &self.r2
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// The canonical representative of the +-(r1,r2) mod Z^2 class: reduce
    /// to fractional parts, then take the lexicographically smaller of the
    /// reduction and the reduction of the negation. Idempotent.
    pub fn canonical(&self) -> SiegelIndex {
        let direct = (fractional_part(&self.r1), fractional_part(&self.r2));
        let negated = (
            fractional_part(&(-&self.r1)),
            fractional_part(&(-&self.r2)),
        );
        let (r1, r2) = direct.min(negated);
        SiegelIndex { r1, r2, level: self.level }
    }

    pub fn is_canonical(&self) -> bool {
        let c = self.canonical();
        c.r1 == self.r1 && c.r2 == self.r2
    }

    /// Right action (r1, r2) |-> (r1 a + r2 c, r1 b + r2 d), canonically
    /// reduced. Unimodularity makes an integral image impossible for a valid
    /// index; that case is still checked and flagged.
    pub fn transform(&self, alpha: &IntegerMatrix2x2) -> Result<SiegelIndex> {
        let r1 = &self.r1 * rat(alpha.a, 1) + &self.r2 * rat(alpha.c, 1);
        let r2 = &self.r1 * rat(alpha.b, 1) + &self.r2 * rat(alpha.d, 1);
        if r1.is_integer() && r2.is_integer() {
            return Err(Error::IntegralIndex { r1, r2 });
        }
        Ok(SiegelIndex { r1, r2, level: self.level }.canonical())
    }
}

/// Canonical form of an index (free function mirror of the method).
pub fn canonical_index(idx: &SiegelIndex) -> SiegelIndex {
    idx.canonical()
}

/// Index action by a unimodular matrix (free function mirror).
pub fn transform_index(idx: &SiegelIndex, alpha: &IntegerMatrix2x2) -> Result<SiegelIndex> {
    idx.transform(alpha)
}

/// Coefficient field level for expansions at index level N.
pub fn coefficient_level(level: u64) -> u64 {
    2 * level * level
}

/// The expansion of the product definition for exactly this representative,
/// requiring r1 in [0,1) so every product exponent is nonnegative. No
/// canonical reduction is applied: product identities (where equivalent
/// indices must keep their individual root-of-unity prefactors) need the raw
/// series.
pub fn expand_raw(idx: &SiegelIndex, truncation: &Rational) -> Result<QSeries> {
    if idx.r1.is_negative() || idx.r1 >= rat(1, 1) {
        return Err(Error::NonCanonicalIndex { r1: idx.r1.clone(), r2: idx.r2.clone() });
    }
    let n = idx.level;
    let m = coefficient_level(n);
    // r1 = p/N, r2 = s/N as integers
    let p = (&idx.r1 * rat(n as i64, 1)).to_integer().to_i64().expect("index bounded");
    let s = (&idx.r2 * rat(n as i64, 1)).to_integer().to_i64().expect("index bounded");

    let alpha = bernoulli2(&idx.r1) / rat(2, 1);
    // -e^(pi i r2 (r1 - 1)) = -zeta_{2N^2}^(s (p - N))
    let prefactor =
        CyclotomicElement::root_of_unity(m, s * (p - n as i64)).neg();
    let mut series = QSeries::monomial(alpha.clone(), prefactor, truncation.clone());

    // e^(2 pi i r2) = zeta_{2N^2}^(2 N s)
    let zeta_pos = CyclotomicElement::root_of_unity(m, 2 * n as i64 * s);
    let zeta_neg = CyclotomicElement::root_of_unity(m, -2 * (n as i64) * s);
    let window = truncation - &alpha; // factors with order past this are 1 here
    let one = CyclotomicElement::one(m);
    let factor = |exponent: Rational, zeta: &CyclotomicElement| -> QSeries {
        QSeries::monomial(Rational::zero(), one.clone(), window.clone())
            .sub(&QSeries::monomial(exponent, zeta.clone(), window.clone()))
            .expect("same level")
    };

    // (1 - q^r1 e^(2 pi i r2)); for r1 = 0 this merges into a constant
    series = series.mul(&factor(idx.r1.clone(), &zeta_pos))?;
    let mut nn = 1i64;
    loop {
        let e_pos = rat(nn, 1) + &idx.r1;
        let e_neg = rat(nn, 1) - &idx.r1;
        if e_neg >= window && e_pos >= window {
            break;
        }
        if e_pos < window {
            series = series.mul(&factor(e_pos, &zeta_pos))?;
        }
        if e_neg < window {
            series = series.mul(&factor(e_neg, &zeta_neg))?;
        }
        nn += 1;
    }
    Ok(series)
}

/// Expansion of the canonical representative (the form whose 12N-th power
/// is a class invariant).
pub fn siegel_expansion(idx: &SiegelIndex, truncation: &Rational) -> Result<QSeries> {
    if !idx.is_canonical() {
        return Err(Error::NonCanonicalIndex { r1: idx.r1.clone(), r2: idx.r2.clone() });
    }
    expand_raw(idx, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn idx(r1: Rational, r2: Rational, n: u64) -> SiegelIndex {
        SiegelIndex::new(r1, r2, n).unwrap()
    }

    #[test]
    fn index_validation() {
        assert!(SiegelIndex::new(rat(0, 1), rat(1, 2), 2).is_ok());
        // (1, 2) is integral
        assert!(matches!(
            SiegelIndex::new(rat(1, 1), rat(2, 1), 2),
            Err(Error::IntegralIndex { .. })
        ));
        // 1/3 is not in (1/2)Z
        assert!(matches!(
            SiegelIndex::new(rat(1, 3), rat(0, 1), 2),
            Err(Error::IndexDenominator { .. })
        ));
    }

    #[test]
    fn canonical_examples() {
        let c = idx(rat(0, 1), rat(3, 2), 2).canonical();
        assert_eq!((c.r1(), c.r2()), (&rat(0, 1), &rat(1, 2)));
        // (-1/5, 0): fractional gives (4/5, 0), negation gives (1/5, 0)
        let c = idx(rat(-1, 5), rat(0, 1), 5).canonical();
        assert_eq!((c.r1(), c.r2()), (&rat(1, 5), &rat(0, 1)));
        // idempotent on a spread of indices
        for (a, b) in [(-7i64, 3i64), (4, -9), (11, 11), (-1, -1), (2, 5)] {
            let i = idx(rat(a, 6), rat(b, 6), 6);
            let c1 = i.canonical();
            let c2 = c1.canonical();
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn transform_examples() {
        // (0, k/N) under (1 0 / t 1) -> (kt/N, k/N) reduced
        let i = idx(rat(0, 1), rat(1, 3), 3);
        let t = i.transform(&IntegerMatrix2x2::lower_shear(2)).unwrap();
        assert_eq!(t, idx(rat(2, 3), rat(1, 3), 3).canonical());

        let id = IntegerMatrix2x2::identity();
        let j = idx(rat(1, 4), rat(3, 4), 4).canonical();
        assert_eq!(j.transform(&id).unwrap(), j);
    }

    #[test]
    fn transform_is_right_action() {
        let mats = [
            IntegerMatrix2x2::new(1, 1, 0, 1).unwrap(),
            IntegerMatrix2x2::new(2, 1, 1, 1).unwrap(),
            IntegerMatrix2x2::new(0, -1, 1, 0).unwrap(),
            IntegerMatrix2x2::lower_shear(3),
        ];
        let indices = [
            idx(rat(1, 5), rat(2, 5), 5),
            idx(rat(0, 1), rat(4, 5), 5),
            idx(rat(3, 5), rat(3, 5), 5),
        ];
        for i in &indices {
            for a in &mats {
                for b in &mats {
                    let lhs = i.transform(a).unwrap().transform(b).unwrap();
                    let rhs = i.transform(&a.mul(b)).unwrap();
                    assert_eq!(lhs, rhs, "action law fails");
                }
            }
        }
    }

    #[test]
    fn unimodularity_is_enforced() {
        assert!(matches!(
            IntegerMatrix2x2::new(1, 0, 0, -1),
            Err(Error::NotUnimodular { det: -1, .. })
        ));
        assert!(IntegerMatrix2x2::new(1, 0, 7, 1).is_ok());
    }

    #[test]
    fn half_index_expansion_leading_terms() {
        // g_(0,1/2) = 2 zeta_4 q^(1/12) prod (1 + q^n)^2:
        // coefficients 2i * (1, 2, 3, 6, 9, ...) at q^(1/12 + k)
        let i = idx(rat(0, 1), rat(1, 2), 2);
        let s = siegel_expansion(&i, &rat(50, 12)).unwrap();
        assert_eq!(s.q_order().unwrap(), rat(1, 12));
        let two_i = CyclotomicElement::root_of_unity(8, 2).scale(&rat(2, 1));
        for (k, mult) in [(0i64, 1i64), (1, 2), (2, 3), (3, 6), (4, 9)] {
            assert_eq!(
                s.coefficient(&(rat(1, 12) + rat(k, 1))),
                Some(&two_i.scale(&rat(mult, 1))),
                "coefficient at offset {k}"
            );
        }
    }

    #[test]
    fn leading_exponent_matches_bernoulli_value() {
        // ord_q g_(r1, r2) = B2(<r1>)/2, tested against the raw product
        for n in 2..=6u64 {
            for p in 0..n {
                for s in 0..n {
                    if p == 0 && s == 0 {
                        continue;
                    }
                    let i = idx(rat(p as i64, n as i64), rat(s as i64, n as i64), n);
                    let series = expand_raw(&i, &rat(3, 1)).unwrap();
                    let expected = bernoulli2(&rat(p as i64, n as i64)) / rat(2, 1);
                    assert_eq!(series.q_order().unwrap(), expected, "index ({p}/{n}, {s}/{n})");
                }
            }
        }
    }

    #[test]
    fn half_zero_index_has_negative_leading_exponent() {
        let i = idx(rat(1, 2), rat(0, 1), 2);
        let s = siegel_expansion(&i, &rat(2, 1)).unwrap();
        assert_eq!(s.q_order().unwrap(), rat(-1, 24));
    }

    #[test]
    fn twelve_n_power_is_class_invariant() {
        // raw expansions of equivalent indices differ by a root of unity;
        // their 12N-th powers must agree term-by-term
        let n = 3u64;
        let t = rat(3, 1);
        let pairs = [
            (idx(rat(0, 1), rat(1, 3), n), idx(rat(0, 1), rat(2, 3), n)),
            (idx(rat(1, 3), rat(2, 3), n), idx(rat(2, 3), rat(1, 3), n)),
        ];
        for (a, b) in &pairs {
            let pa = expand_raw(a, &t).unwrap().pow(12 * n).unwrap();
            let pb = expand_raw(b, &t).unwrap().pow(12 * n).unwrap();
            pa.equal_to_truncation(&pb).unwrap();
        }
        // the raw first powers of the second pair differ (the prefactors of
        // negated indices agree only up to zeta_{2N^2}^(N(s-p)))
        let ra = expand_raw(&pairs[1].0, &t).unwrap();
        let rb = expand_raw(&pairs[1].1, &t).unwrap();
        assert!(ra.equal_to_truncation(&rb).is_err());
    }

    #[test]
    fn raw_expansion_requires_fractional_first_coordinate() {
        let i = idx(rat(-1, 5), rat(0, 1), 5);
        assert!(matches!(
            expand_raw(&i, &rat(2, 1)),
            Err(Error::NonCanonicalIndex { .. })
        ));
    }
}
