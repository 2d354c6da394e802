//! Formal q-expansions with rational exponents, cyclotomic coefficients,
//! and explicit truncation bookkeeping.
//!
//! A series knows its coefficients strictly below its truncation order;
//! everything at or past the truncation is unknown, not zero. Every
//! operation computes the correct truncation of its result from the
//! truncations and leading orders of its inputs, so precision can only be
//! lost honestly, never silently. Exponents are exact rationals — the
//! natural denominators here (12, N, 12N^2) vary per construction and a
//! fixed grid would invite silent truncation bugs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeff_level: u64,
    /// exponent -> nonzero coefficient, all exponents < truncation
    terms: BTreeMap<Rational, CyclotomicElement>,
    truncation: Rational,
}

impl QSeries {
    /// The zero series, known below `truncation`.
    pub fn zero(coeff_level: u64, truncation: Rational) -> Self {
        QSeries { coeff_level, terms: BTreeMap::new(), truncation }
    }

    pub fn constant(coeff_level: u64, value: Rational, truncation: Rational) -> Self {
        Self::monomial(
            Rational::zero(),
            CyclotomicElement::from_rational(coeff_level, value),
            truncation,
        )
    }

    /// `coefficient * q^exponent`, known below `truncation`.
    pub fn monomial(
        exponent: Rational,
        coefficient: CyclotomicElement,
        truncation: Rational,
    ) -> Self {
        let coeff_level = coefficient.level();
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() && exponent < truncation {
            terms.insert(exponent, coefficient);
        }
        QSeries { coeff_level, terms, truncation }
    }

    pub fn coeff_level(&self) -> u64 {
        self.coeff_level
    }

    pub fn truncation(&self) -> &Rational {
        &self.truncation
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &CyclotomicElement)> {
        self.terms.iter()
    }

    pub fn is_zero_to_truncation(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: &Rational) -> Option<&CyclotomicElement> {
        self.terms.get(exponent)
    }

    /// Minimal exponent carrying a nonzero coefficient.
    pub fn q_order(&self) -> Result<Rational> {
        self.terms
            .keys()
            .next()
            .cloned()
            .ok_or(Error::IndeterminateOrder)
    }

    /// Lower bound on the true order that is valid even for series with no
    /// visible terms (where only "order >= truncation" is known).
    fn order_floor(&self) -> Rational {
        self.terms
            .keys()
            .next()
            .cloned()
            .unwrap_or_else(|| self.truncation.clone())
    }

    fn check_level(&self, other: &QSeries) -> Result<()> {
        if self.coeff_level != other.coeff_level {
            return Err(Error::LevelMismatch {
                left: self.coeff_level,
                right: other.coeff_level,
            });
        }
        Ok(())
    }

    /// Drops any stored term at or past the truncation (used after
    /// truncation tightening) and any zero coefficient.
    fn normalize(&mut self) {
        let t = self.truncation.clone();
        self.terms.retain(|e, c| *e < t && !c.is_zero());
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        self.check_level(other)?;
        let truncation = self.truncation.clone().min(other.truncation.clone());
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            match terms.get_mut(e) {
                Some(acc) => *acc = acc.add(c)?,
                None => {
                    terms.insert(e.clone(), c.clone());
                }
            }
        }
        let mut out = QSeries { coeff_level: self.coeff_level, terms, truncation };
        out.normalize();
        Ok(out)
    }

    pub fn neg(&self) -> QSeries {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect();
        QSeries { coeff_level: self.coeff_level, terms, truncation: self.truncation.clone() }
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &CyclotomicElement) -> Result<QSeries> {
        if factor.level() != self.coeff_level {
            return Err(Error::LevelMismatch { left: self.coeff_level, right: factor.level() });
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.clone(), c.mul(factor)?);
        }
        let mut out =
            QSeries { coeff_level: self.coeff_level, terms, truncation: self.truncation.clone() };
        out.normalize();
        Ok(out)
    }

    /// Shifts every exponent by `delta` (multiplication by q^delta).
    pub fn shift(&self, delta: &Rational) -> QSeries {
        let terms = self.terms.iter().map(|(e, c)| (e + delta, c.clone())).collect();
        QSeries {
            coeff_level: self.coeff_level,
            terms,
            truncation: &self.truncation + delta,
        }
    }

    /// Product, with truncation min(T_a + ord(b), T_b + ord(a)): a term of a
    /// at or past T_a is unknown and enters the product multiplied by the
    /// leading term of b, so nothing past that sum is determined.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        self.check_level(other)?;
        let truncation = (&self.truncation + other.order_floor())
            .min(&other.truncation + self.order_floor());
        let mut terms: BTreeMap<Rational, CyclotomicElement> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= truncation {
                    continue;
                }
                let p = ca.mul(cb)?;
                match terms.get_mut(&e) {
                    Some(acc) => *acc = acc.add(&p)?,
                    None => {
                        terms.insert(e, p);
                    }
                }
            }
        }
        let mut out = QSeries { coeff_level: self.coeff_level, terms, truncation };
        out.normalize();
        Ok(out)
    }

    pub fn pow(&self, exponent: u64) -> Result<QSeries> {
        if exponent == 0 {
            return Ok(QSeries::constant(
                self.coeff_level,
                Rational::one(),
                // unknown-past-truncation data cannot sharpen by powering;
                // keep the conservative window of the base
                self.truncation.clone() - self.order_floor(),
            ));
        }
        let mut acc: Option<QSeries> = None;
        let mut base = self.clone();
        let mut e = exponent;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(acc.expect("exponent > 0"))
    }

    /// Inverse of a series with nonzero leading coefficient. Writing
    /// x = c q^alpha (1 + u) with ord(u) > 0, the inverse is known below
    /// T - 2 alpha: x is known to relative precision T - alpha, and the
    /// leading shift costs another alpha.
    pub fn invert(&self) -> Result<QSeries> {
        let alpha = self.q_order()?;
        let rel = &self.truncation - &alpha; // relative precision window
        if rel <= Rational::zero() {
            return Err(Error::TruncationTooSmall { truncation: self.truncation.clone() });
        }
        // common denominator of the relative exponent grid
        let mut den = rel.denom().clone();
        for e in self.terms.keys() {
            den = den.lcm((e - &alpha).denom());
        }
        let steps = ((&rel * Rational::from(den.clone()))
            .ceil()
            .to_integer())
        .to_usize()
        .ok_or_else(|| Error::InvalidParameter("truncation window too large".into()))?;
        // dense normalized coefficient table w[i] at exponent alpha + i/den
        let mut w = vec![CyclotomicElement::zero(self.coeff_level); steps];
        for (e, c) in &self.terms {
            let idx = ((e - &alpha) * Rational::from(den.clone())).to_integer();
            let idx = idx.to_usize().expect("exponent within window");
            if idx < steps {
                w[idx] = c.clone();
            }
        }
        let lead_inv = CyclotomicElement::one(self.coeff_level).div(&w[0])?;
        // v * w = 1 solved triangularly on the grid
        let mut v = vec![CyclotomicElement::zero(self.coeff_level); steps];
        v[0] = lead_inv.clone();
        for i in 1..steps {
            let mut acc = CyclotomicElement::zero(self.coeff_level);
            for j in 1..=i {
                if !w[j].is_zero() && !v[i - j].is_zero() {
                    acc = acc.add(&w[j].mul(&v[i - j])?)?;
                }
            }
            v[i] = acc.neg().mul(&lead_inv)?;
        }
        let mut terms = BTreeMap::new();
        let den_rat = Rational::from(den);
        for (i, c) in v.into_iter().enumerate() {
            if !c.is_zero() {
                terms.insert(
                    Rational::from(BigInt::from(i)) / &den_rat - &alpha,
                    c,
                );
            }
        }
        Ok(QSeries {
            coeff_level: self.coeff_level,
            terms,
            truncation: rel - alpha,
        })
    }

    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        self.mul(&other.invert()?)
    }

    /// Re-express every coefficient in Q(zeta_target).
    pub fn lift_coefficients(&self, target: u64) -> Result<QSeries> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.clone(), c.lift_level(target)?);
        }
        Ok(QSeries { coeff_level: target, terms, truncation: self.truncation.clone() })
    }

    /// Tightens the truncation (discarding terms past it); widening is not
    /// possible and errors.
    pub fn truncate(&self, truncation: Rational) -> Result<QSeries> {
        if truncation > self.truncation {
            return Err(Error::TruncationTooSmall { truncation: self.truncation.clone() });
        }
        let mut out = self.clone();
        out.truncation = truncation;
        out.normalize();
        Ok(out)
    }

    /// Exact term-by-term comparison below the smaller truncation; on
    /// failure reports the first differing exponent.
    pub fn equal_to_truncation(&self, other: &QSeries) -> Result<()> {
        self.check_level(other)?;
        let window = self.truncation.clone().min(other.truncation.clone());
        let zero = CyclotomicElement::zero(self.coeff_level);
        let mut exponents: Vec<&Rational> =
            self.terms.keys().chain(other.terms.keys()).collect();
        exponents.sort();
        exponents.dedup();
        for e in exponents {
            if *e >= window {
                break;
            }
            let a = self.terms.get(e).unwrap_or(&zero);
            let b = other.terms.get(e).unwrap_or(&zero);
            if a != b {
                return Err(Error::SeriesMismatch { exponent: e.clone() });
            }
        }
        Ok(())
    }

    /// `[{exponent, coords}...]` plus the coefficient level and truncation.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                json!({
                    "exponent": e.to_string(),
                    "coords": c.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "coefficient_level": self.coeff_level,
            "truncation": self.truncation.to_string(),
            "terms": terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn s(level: u64, parts: &[(i64, i64, i64)], trunc: Rational) -> QSeries {
        // parts: (numer, denom, coefficient) with rational coefficient
        let mut acc = QSeries::zero(level, trunc.clone());
        for &(n, d, c) in parts {
            acc = acc
                .add(&QSeries::monomial(
                    rat(n, d),
                    CyclotomicElement::from_rational(level, rat(c, 1)),
                    trunc.clone(),
                ))
                .unwrap();
        }
        acc
    }

    #[test]
    fn truncation_of_products() {
        // (1 + q + ... < q^5) * (q^2) is known strictly below q^7
        let a = s(1, &[(0, 1, 1), (1, 1, 1)], rat(5, 1));
        let b = s(1, &[(2, 1, 1)], rat(9, 1));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.truncation(), &rat(7, 1));
        assert_eq!(p.q_order().unwrap(), rat(2, 1));
    }

    #[test]
    fn zero_series_order_is_indeterminate() {
        let z = QSeries::zero(1, rat(4, 1));
        assert!(matches!(z.q_order(), Err(Error::IndeterminateOrder)));
        assert_eq!(QSeries::constant(1, rat(5, 1), rat(4, 1)).q_order().unwrap(), rat(0, 1));
    }

    #[test]
    fn geometric_series_inverse() {
        // (1 - q)^-1 = 1 + q + q^2 + ... exactly to the window
        let one_minus_q = s(1, &[(0, 1, 1), (1, 1, -1)], rat(6, 1));
        let inv = one_minus_q.invert().unwrap();
        assert_eq!(inv.truncation(), &rat(6, 1));
        for k in 0..6 {
            assert_eq!(
                inv.coefficient(&rat(k, 1)),
                Some(&CyclotomicElement::one(1)),
                "coefficient of q^{k}"
            );
        }
    }

    #[test]
    fn inverse_respects_leading_shift() {
        // x = q^(1/2) (1 - q): inverse known below T - 2 * (1/2)
        let x = s(1, &[(1, 2, 1), (3, 2, -1)], rat(5, 1));
        let inv = x.invert().unwrap();
        assert_eq!(inv.truncation(), &rat(4, 1));
        assert_eq!(inv.q_order().unwrap(), rat(-1, 2));
        let product = x.mul(&inv).unwrap();
        assert_eq!(product.q_order().unwrap(), rat(0, 1));
        assert_eq!(
            product.coefficient(&rat(0, 1)),
            Some(&CyclotomicElement::one(1))
        );
        // all later known coefficients vanish
        assert_eq!(product.terms().count(), 1);
    }

    #[test]
    fn multiply_then_divide_roundtrip() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..10 {
            let mut parts = vec![(0i64, 1i64, 1 + (next() % 5) as i64)];
            for k in 1..6 {
                parts.push((k, 2, (next() % 9) as i64 - 4));
            }
            let u = s(1, &parts, rat(8, 1));
            let v = s(1, &[(0, 1, 2), (1, 3, 1), (2, 1, -3)], rat(8, 1));
            let round = v.mul(&u).unwrap().div(&u).unwrap();
            let window = round.truncation().clone();
            round
                .equal_to_truncation(&v.truncate(window).unwrap())
                .unwrap();
        }
    }

    #[test]
    fn q_order_is_multiplicative() {
        let a = s(1, &[(1, 3, 2), (2, 1, 5)], rat(7, 1));
        let b = s(1, &[(-1, 2, 1), (1, 1, 1)], rat(7, 1));
        let ab = a.mul(&b).unwrap();
        assert_eq!(
            ab.q_order().unwrap(),
            a.q_order().unwrap() + b.q_order().unwrap()
        );
    }

    #[test]
    fn powers_compose() {
        let a = s(1, &[(0, 1, 1), (1, 1, -1)], rat(6, 1));
        let direct = a.mul(&a).unwrap().mul(&a).unwrap();
        let powered = a.pow(3).unwrap();
        assert_eq!(direct, powered);
        let p0 = a.pow(0).unwrap();
        assert_eq!(p0.coefficient(&rat(0, 1)), Some(&CyclotomicElement::one(1)));
        assert_eq!(p0.terms().count(), 1);
    }

    #[test]
    fn mismatch_reports_first_divergent_exponent() {
        let a = s(1, &[(0, 1, 1), (1, 1, 2), (2, 1, 3)], rat(5, 1));
        let b = s(1, &[(0, 1, 1), (1, 1, 2), (2, 1, 4)], rat(5, 1));
        match a.equal_to_truncation(&b) {
            Err(Error::SeriesMismatch { exponent }) => assert_eq!(exponent, rat(2, 1)),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn json_lists_terms_in_exponent_order() {
        let a = s(1, &[(3, 2, 7), (-1, 1, 2)], rat(4, 1));
        let v = a.to_json();
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms[0]["exponent"], "-1");
        assert_eq!(terms[1]["exponent"], "3/2");
    }
}
