//! Arithmetic in the cyclotomic field Q(zeta_l).
//!
//! Elements are coordinate vectors on the power basis
//! `1, zeta, zeta^2, ..., zeta^(phi(l)-1)` with exact rational coordinates;
//! products are reduced modulo the l-th cyclotomic polynomial. The basis
//! makes representations canonical, so equality is coordinate equality.
//!
//! Per-level data (the modulus and a table reducing the powers
//! `zeta^phi, ..., zeta^max(2 phi - 2, l - 1)`) is built once and shared
//! behind a process-wide cache, so elements stay plain `(level, coords)`
//! values that are cheap to clone and safe to move across threads.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{euler_phi_u64, factor_u64, gcd_u64};
use crate::error::{Error, Result};
use crate::rational::Rational;

// ---------------------------------------------------------------------------
// integer polynomials (dense little-endian, used only to build level data)
// ---------------------------------------------------------------------------

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Exact division of integer polynomials with a monic divisor.
/// Panics if the division leaves a remainder; callers only divide where
/// exactness is a theorem.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().is_some_and(|c| c.is_one()), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    poly_trim(&mut rem);
    let d = den.len() - 1;
    if rem.len() < den.len() {
        assert!(rem.is_empty(), "inexact polynomial division");
        return Vec::new();
    }
    let mut quot = vec![BigInt::zero(); rem.len() - d];
    for k in (0..quot.len()).rev() {
        let c = std::mem::take(&mut rem[k + d]);
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den[..d].iter().enumerate() {
            let sub = dj * &c;
            rem[k + j] -= sub;
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// `f(X^p)` by spacing out coefficients.
fn poly_substitute_power(f: &[BigInt], p: u64) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); (f.len() - 1) * p as usize + 1];
    for (i, c) in f.iter().enumerate() {
        out[i * p as usize] = c.clone();
    }
    out
}

/// The l-th cyclotomic polynomial as a dense integer coefficient vector
/// (little-endian, monic, degree phi(l)).
///
/// Built from `Phi_1 = X - 1` by the standard two-step recipe: for each
/// prime p dividing the radical, `Phi_rad(X) <- Phi(X^p) / Phi(X)`, and
/// finally `Phi_l(X) = Phi_rad(X^(l/rad))`.
pub fn cyclotomic_polynomial(level: u64) -> Vec<BigInt> {
    assert!(level >= 1, "level must be positive");
    let factors = factor_u64(level);
    let radical: u64 = factors.iter().map(|(p, _)| p).product();
    let mut f = vec![-BigInt::one(), BigInt::one()]; // X - 1
    for &(p, _) in &factors {
        f = poly_div_exact(&poly_substitute_power(&f, p), &f);
    }
    if level / radical > 1 {
        f = poly_substitute_power(&f, level / radical);
    }
    f
}

// ---------------------------------------------------------------------------
// per-level reduction data
// ---------------------------------------------------------------------------

struct LevelData {
    phi: usize,
    /// Phi_l as rationals, for the inversion Euclid loop.
    modulus: Vec<Rational>,
    /// `reduction[k]` = coordinates of `zeta^(phi + k)`; covers every power
    /// needed by products (up to `2 phi - 2`) and by exponent maps
    /// (up to `l - 1`).
    reduction: Vec<Vec<Rational>>,
}

impl LevelData {
    fn build(level: u64) -> Arc<LevelData> {
        let modulus_int = cyclotomic_polynomial(level);
        let phi = modulus_int.len() - 1;
        let max_pow = (2 * phi).saturating_sub(2).max(level as usize - 1);
        let mut reduction: Vec<Vec<Rational>> = Vec::new();
        if max_pow >= phi {
            let first: Vec<Rational> = modulus_int[..phi]
                .iter()
                .map(|c| Rational::from(-c.clone()))
                .collect();
            reduction.push(first);
            for _ in phi..max_pow {
                let prev = reduction.last().unwrap();
                let carry = prev[phi - 1].clone();
                let mut next = vec![Rational::zero(); phi];
                for j in 1..phi {
                    next[j] = prev[j - 1].clone();
                }
                if !carry.is_zero() {
                    let top = &reduction[0];
                    for j in 0..phi {
                        if !top[j].is_zero() {
                            let add = &top[j] * &carry;
                            next[j] += add;
                        }
                    }
                }
                reduction.push(next);
            }
        }
        let modulus = modulus_int.iter().map(|c| Rational::from(c.clone())).collect();
        Arc::new(LevelData { phi, modulus, reduction })
    }
}

fn level_data(level: u64) -> Arc<LevelData> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<LevelData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(data) = cache.lock().unwrap().get(&level) {
        return data.clone();
    }
    // built outside the lock: construction can be slow for large levels
    let data = LevelData::build(level);
    cache
        .lock()
        .unwrap()
        .entry(level)
        .or_insert(data)
        .clone()
}

/// phi(l), the degree of Q(zeta_l) over Q.
pub fn degree_of_level(level: u64) -> usize {
    euler_phi_u64(level) as usize
}

// ---------------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------------

/// An element of Q(zeta_l) in power-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicElement {
    level: u64,
    coords: Vec<Rational>,
}

impl CyclotomicElement {
    /// Wrap a coordinate vector; its length must be phi(level).
    pub fn new(level: u64, coords: Vec<Rational>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        let phi = degree_of_level(level);
        if coords.len() != phi {
            return Err(Error::CoordinateLength { got: coords.len(), expected: phi });
        }
        Ok(CyclotomicElement { level, coords })
    }

    pub fn zero(level: u64) -> Self {
        CyclotomicElement { level, coords: vec![Rational::zero(); degree_of_level(level)] }
    }

    pub fn one(level: u64) -> Self {
        Self::from_rational(level, Rational::one())
    }

    pub fn from_rational(level: u64, value: Rational) -> Self {
        let mut out = Self::zero(level);
        out.coords[0] = value;
        out
    }

    pub fn from_integer(level: u64, value: i64) -> Self {
        Self::from_rational(level, Rational::from(BigInt::from(value)))
    }

    /// `zeta_l^k` (k may be any integer; it is reduced mod l).
    pub fn root_of_unity(level: u64, k: i64) -> Self {
        let e = k.rem_euclid(level as i64) as usize;
        let data = level_data(level);
        let mut out = Self::zero(level);
        if e < data.phi {
            out.coords[e] = Rational::one();
        } else {
            out.coords.clone_from(&data.reduction[e - data.phi]);
        }
        out
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// `Some(r)` iff the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CyclotomicElement { level: self.level, coords })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CyclotomicElement { level: self.level, coords })
    }

    pub fn neg(&self) -> Self {
        CyclotomicElement {
            level: self.level,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, by: &Rational) -> Self {
        CyclotomicElement {
            level: self.level,
            coords: self.coords.iter().map(|c| c * by).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let data = level_data(self.level);
        let phi = data.phi;
        let mut conv = vec![Rational::zero(); 2 * phi - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        let mut coords: Vec<Rational> = conv[..phi].to_vec();
        for k in phi..conv.len() {
            if conv[k].is_zero() {
                continue;
            }
            let row = &data.reduction[k - phi];
            for j in 0..phi {
                if !row[j].is_zero() {
                    let add = &row[j] * &conv[k];
                    coords[j] += add;
                }
            }
        }
        Ok(CyclotomicElement { level: self.level, coords })
    }

    /// Nonnegative integer power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same level");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same level");
            }
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the (irreducible) modulus, so the gcd is a nonzero constant.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero { level: self.level });
        }
        let data = level_data(self.level);
        let mut r0 = data.modulus.clone();
        let mut r1 = self.coords.clone();
        rpoly_trim(&mut r1);
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = rpoly_divmod(&r0, &r1);
            let qs1 = rpoly_mul(&q, &s1);
            let s2 = rpoly_sub(&s0, &qs1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        debug_assert_eq!(r0.len(), 1, "cyclotomic modulus is irreducible");
        let c = r0[0].clone();
        let mut coords = vec![Rational::zero(); data.phi];
        for (i, v) in s0.iter().enumerate() {
            coords[i] = v / &c;
        }
        Ok(CyclotomicElement { level: self.level, coords })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// The automorphism `zeta -> zeta^t`, defined for gcd(t, l) = 1.
    pub fn galois_apply(&self, t: u64) -> Result<Self> {
        let l = self.level;
        if l == 1 {
            return Ok(self.clone());
        }
        let t = t % l;
        if gcd_u64(t, l) != 1 {
            return Err(Error::NotCoprime { t, level: l });
        }
        let data = level_data(l);
        let mut out = Self::zero(l);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (j as u64 * t % l) as usize;
            if e < data.phi {
                out.coords[e] += c;
            } else {
                let row = &data.reduction[e - data.phi];
                for i in 0..data.phi {
                    if !row[i].is_zero() {
                        let add = &row[i] * c;
                        out.coords[i] += add;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Embed Q(zeta_n) into Q(zeta_l) for n | l, via `zeta_n -> zeta_l^(l/n)`.
    pub fn lift_level(&self, target: u64) -> Result<Self> {
        if target == 0 || target % self.level != 0 {
            return Err(Error::NotDivisor { sub: self.level, level: target });
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let stride = target / self.level;
        let data = level_data(target);
        let mut out = Self::zero(target);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = j * stride as usize;
            if e < data.phi {
                out.coords[e] += c;
            } else {
                let row = &data.reduction[e - data.phi];
                for i in 0..data.phi {
                    if !row[i].is_zero() {
                        let add = &row[i] * c;
                        out.coords[i] += add;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugation `zeta -> zeta^(-1)`.
    pub fn conjugate(&self) -> Self {
        if self.level <= 2 {
            return self.clone();
        }
        self.galois_apply(self.level - 1).expect("l - 1 is a unit mod l")
    }

    /// Fixed by complex conjugation, i.e. lies in the maximal real subfield.
    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicElement(level {}: {})", self.level, self)
    }
}

impl fmt::Display for CyclotomicElement {
    /// Render as a polynomial in `z` = zeta_level, e.g. `1/2 - 1/2 z^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            match j {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag} ")?;
                    }
                    if j == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{j}")?;
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// rational polynomial helpers for the inversion Euclid loop
// ---------------------------------------------------------------------------

fn rpoly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rpoly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn rpoly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        out[i] = ai.clone();
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] -= bi;
    }
    rpoly_trim(&mut out);
    out
}

fn rpoly_divmod(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    rpoly_trim(&mut rem);
    let dd = den.len() - 1;
    let lead = &den[dd];
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dd] / lead;
        if c.is_zero() {
            continue;
        }
        for j in 0..dd {
            let sub = &den[j] * &c;
            rem[k + j] -= sub;
        }
        rem[k + dd] = Rational::zero();
        quot[k] = c;
    }
    rpoly_trim(&mut rem);
    (quot, rem)
}
