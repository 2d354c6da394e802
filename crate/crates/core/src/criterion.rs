//! The archimedean valuation criterion: if x is real with all conjugate
//! ratios |x^gamma / x| < 1, then a high enough power of x is completely
//! normal, and the minimal sufficient exponent m is the least one with
//! B^m <= 1/n (n the extension degree, B a bound on the ratios).
//!
//! Every comparison between real algebraic numbers is resolved exactly:
//! equality is decided in exact arithmetic (the difference is a field element
//! with a decidable zero test), and once equality is excluded, adaptive
//! interval refinement certifies the strict inequality. Minimal exponents are
//! therefore independent of the precision policy; the policy only moves work
//! between refinement rounds.
//!
//! Produced exponents are never trusted on the theorem's word alone: each
//! operation cross-verifies its result against the exact normality oracles
//! before returning.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::cyclotomic::CyclotomicElement;
use crate::elements::{cos_half_element, cos_plus_one_element};
use crate::error::{Error, Result};
use crate::galois::{all_subgroups, GaloisGroup, GroupMode, Subgroup};
use crate::normality::is_completely_normal_power;
use crate::rational::{rat, Rational};

/// Interval-refinement schedule for sign certification.
#[derive(Clone, Copy, Debug)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { start_bits: 64, max_bits: 1 << 16 }
    }
}

/// Exact sign of a real cyclotomic element: algebraic zero test first, then
/// interval refinement (which terminates on any nonzero element).
pub fn sign_of_real_element(x: &CyclotomicElement, policy: &PrecisionPolicy) -> Result<Ordering> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    if x.is_zero() {
        return Ok(Ordering::Equal);
    }
    let mut bits = policy.start_bits.max(8);
    loop {
        let enclosure = x.numeric_eval(bits, 1)?;
        if let Some(sign) = enclosure.re().certain_sign() {
            return Ok(sign);
        }
        if bits >= policy.max_bits {
            return Err(Error::PrecisionExhausted { max_bits: policy.max_bits });
        }
        bits = bits.saturating_mul(2).min(policy.max_bits);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionTag {
    Thm31,
    Thm32,
    Cor23,
    Custom,
}

impl ConstructionTag {
    pub fn label(self) -> &'static str {
        match self {
            ConstructionTag::Thm31 => "thm31",
            ConstructionTag::Thm32 => "thm32",
            ConstructionTag::Cor23 => "cor23",
            ConstructionTag::Custom => "custom",
        }
    }
}

/// A certified exponent: `ratio_bound^exponent <= threshold` holds exactly,
/// and the exponent is minimal for the bound (`ratio_bound^(exponent-1) >
/// threshold` unless the exponent is 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentResult {
    pub level: u64,
    pub tag: ConstructionTag,
    pub exponent: u64,
    /// rational upper bound on the conjugate ratios, strictly below 1
    pub ratio_bound: Rational,
    /// 1/n for the degree n of the extension under test
    pub threshold: Rational,
}

impl ExponentResult {
    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "tag": self.tag.label(),
            "exponent": self.exponent,
            "ratio_bound": self.ratio_bound.to_string(),
            "threshold": self.threshold.to_string(),
        })
    }
}

// ---------------------------------------------------------------------------
// ratio machinery
// ---------------------------------------------------------------------------

/// A conjugate ratio q = x^gamma / x, with its exact rational value when it
/// has one (the case that makes ties decidable without intervals).
struct RatioTerm {
    q: CyclotomicElement,
    exact: Option<Rational>,
}

impl RatioTerm {
    fn new(q: CyclotomicElement) -> Self {
        let exact = q.as_rational();
        RatioTerm { q, exact }
    }
}

/// Sign of q^(2m) - 1/n^2, i.e. the exact comparison |q|^m vs 1/n.
fn power_state(term: &RatioTerm, m: u64, n: u64, policy: &PrecisionPolicy) -> Result<Ordering> {
    let target = rat(1, (n * n) as i64);
    if let Some(c) = &term.exact {
        let p = Rational::from((c * c).numer().pow(m.try_into().unwrap()))
            / Rational::from((c * c).denom().pow(m.try_into().unwrap()));
        return Ok(p.cmp(&target));
    }
    let power = term.q.pow(2 * m);
    let diff = power.sub(&CyclotomicElement::from_rational(power.level(), target))?;
    sign_of_real_element(&diff, policy)
}

/// Certifies |q| < 1 for one ratio; anything else is a hypothesis violation.
fn check_contracting(term: &RatioTerm, gamma: u64, policy: &PrecisionPolicy) -> Result<()> {
    let violated = match &term.exact {
        Some(c) => c.abs() >= Rational::one(),
        None => {
            let square = term.q.mul(&term.q)?;
            let diff = square.sub(&CyclotomicElement::one(square.level()))?;
            sign_of_real_element(&diff, policy)? != Ordering::Less
        }
    };
    if violated {
        return Err(Error::HypothesisViolated {
            detail: format!("conjugate ratio at gamma = {gamma} has |x^gamma / x| >= 1"),
        });
    }
    Ok(())
}

/// Minimal m >= 1 with |q|^m <= 1/n, plus whether equality holds exactly at m.
fn minimal_power(term: &RatioTerm, n: u64, policy: &PrecisionPolicy) -> Result<(u64, bool)> {
    // cheap interval estimate to start the walk near the answer
    let mut bits = policy.start_bits.max(8);
    let mut estimate = 1u64;
    loop {
        let upper = if let Some(c) = &term.exact {
            c.abs()
        } else {
            term.q.numeric_eval(bits, 1)?.re().abs_bounds().1
        };
        if upper < Rational::one() {
            let target = rat(1, n as i64);
            let mut acc = upper.clone();
            while acc > target && estimate < 10_000 {
                acc *= &upper;
                estimate += 1;
            }
            break;
        }
        bits = bits.saturating_mul(2).min(policy.max_bits);
        if bits >= policy.max_bits {
            break; // fall back to walking up from 1; exact tests still decide
        }
    }
    // the walk itself is exact, so the estimate cannot bias the result
    let mut m = estimate.max(1);
    while power_state(term, m, n, policy)? == Ordering::Greater {
        m += 1;
    }
    while m > 1 && power_state(term, m - 1, n, policy)? != Ordering::Greater {
        m -= 1;
    }
    Ok((m, power_state(term, m, n, policy)? == Ordering::Equal))
}

/// Smallest power of two p with every |q| <= bound(p) and `accept(bound(p))`;
/// exact rational ratios contribute their exact absolute value.
fn certified_bound(
    terms: &[RatioTerm],
    accept: impl Fn(&Rational) -> bool,
    policy: &PrecisionPolicy,
) -> Result<Rational> {
    if terms.is_empty() {
        return Ok(Rational::zero());
    }
    let mut bits = policy.start_bits.max(8);
    loop {
        let mut bound = Rational::zero();
        for term in terms {
            let upper = match &term.exact {
                Some(c) => c.abs(),
                None => term.q.numeric_eval(bits, 1)?.re().abs_bounds().1,
            };
            bound = bound.max(upper);
        }
        if bound < Rational::one() && accept(&bound) {
            return Ok(bound);
        }
        if bits >= policy.max_bits {
            return Err(Error::PrecisionExhausted { max_bits: policy.max_bits });
        }
        bits = bits.saturating_mul(2).min(policy.max_bits);
    }
}

fn exact_rational_power(base: &Rational, m: u64) -> Rational {
    let e: u32 = m.try_into().unwrap();
    Rational::from(base.numer().pow(e)) / Rational::from(base.denom().pow(e))
}

/// Conjugate ratios x^gamma / x over the non-identity elements of G, each
/// certified contracting (|ratio| < 1). Checks x != 0 and realness of x and
/// all its conjugates.
fn conjugate_ratios(
    x: &CyclotomicElement,
    group: &GaloisGroup,
    policy: &PrecisionPolicy,
) -> Result<Vec<RatioTerm>> {
    if x.is_zero() {
        return Err(Error::InvalidParameter("element must be nonzero".into()));
    }
    if x.level() != group.level() {
        return Err(Error::LevelMismatch { left: x.level(), right: group.level() });
    }
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    let mut terms = Vec::new();
    for &gamma in group.elements() {
        if gamma == group.identity() {
            continue;
        }
        let conj = x.galois_apply(gamma)?;
        // realness is exact via conjugation symmetry; the numeric enclosure
        // of the imaginary part is an independent sanity cross-check
        if !conj.is_real()
            || !conj.numeric_eval(policy.start_bits.max(8), 1)?.im().contains_zero()
        {
            return Err(Error::NotReal);
        }
        let term = RatioTerm::new(conj.div(x)?);
        check_contracting(&term, gamma, policy)?;
        terms.push(term);
    }
    Ok(terms)
}

/// Shared tail: given certified-contracting ratios, find the minimal m with
/// every |q|^m <= 1/n, then a rational bound B >= every |q| with B^m <= 1/n
/// and (for m > 1) B^(m-1) > 1/n.
fn exponent_from_ratios(
    terms: &[RatioTerm],
    n: u64,
    policy: &PrecisionPolicy,
) -> Result<(u64, Rational)> {
    let mut m = 1u64;
    let mut exact_hit_irrational = false;
    for term in terms {
        let (m_term, hit) = minimal_power(term, n, policy)?;
        match m_term.cmp(&m) {
            Ordering::Greater => {
                m = m_term;
                exact_hit_irrational = hit && term.exact.is_none();
            }
            Ordering::Equal => {
                exact_hit_irrational |= hit && term.exact.is_none();
            }
            Ordering::Less => {}
        }
    }
    // |q|^m = 1/n with |q| irrational: no rational B >= |q| can satisfy
    // B^m <= 1/n, so certify one exponent higher (still minimal for B).
    if exact_hit_irrational {
        m += 1;
    }
    let threshold = rat(1, n as i64);
    let bound = certified_bound(
        terms,
        |b| exact_rational_power(b, m) <= threshold,
        policy,
    )?;
    Ok((m, bound))
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// A rational B with |x^gamma / x| <= B < 1 for every gamma != Id,
/// certified by exact zero tests plus adaptive interval refinement.
pub fn ratio_upper_bound(
    x: &CyclotomicElement,
    group: &GaloisGroup,
    policy: &PrecisionPolicy,
) -> Result<Rational> {
    let terms = conjugate_ratios(x, group, policy)?;
    certified_bound(&terms, |_| true, policy)
}

/// Minimal exponent for x over the whole group G, threshold 1/|G|;
/// cross-verified against the normality oracles before returning.
pub fn min_exponent(x: &CyclotomicElement, group: &GaloisGroup) -> Result<ExponentResult> {
    let policy = PrecisionPolicy::default();
    let terms = conjugate_ratios(x, group, &policy)?;
    let n = group.order() as u64;
    let (m, bound) = exponent_from_ratios(&terms, n, &policy)?;
    let result = ExponentResult {
        level: group.level(),
        tag: ConstructionTag::Custom,
        exponent: m,
        ratio_bound: bound,
        threshold: rat(1, n as i64),
    };
    cross_verify(x, &result, group)?;
    Ok(result)
}

/// The sufficient-exponent theorem is a one-way implication, so every
/// produced exponent is checked against the independent exact oracles; a
/// failure here would be a soundness bug, not a data error.
fn cross_verify(
    x: &CyclotomicElement,
    result: &ExponentResult,
    group: &GaloisGroup,
) -> Result<()> {
    let cert = is_completely_normal_power(x, result.exponent, group)?;
    if !cert.completely_normal() {
        return Err(Error::Internal(format!(
            "certified exponent {} at level {} failed the exact normality oracles",
            result.exponent, result.level
        )));
    }
    Ok(())
}

/// Asserts |x^gamma| <= |y| for every non-identity gamma (exact ties allowed):
/// the closed-form ratio |y/x| then dominates every true conjugate ratio.
fn check_domination(
    x: &CyclotomicElement,
    y: &CyclotomicElement,
    group: &GaloisGroup,
    policy: &PrecisionPolicy,
) -> Result<()> {
    let y_sq = y.mul(y)?;
    for &gamma in group.elements() {
        if gamma == group.identity() {
            continue;
        }
        let conj = x.galois_apply(gamma)?;
        let diff = y_sq.sub(&conj.mul(&conj)?)?;
        if !diff.is_zero() && sign_of_real_element(&diff, policy)? == Ordering::Less {
            return Err(Error::HypothesisViolated {
                detail: format!(
                    "closed-form ratio fails to dominate the conjugate at gamma = {gamma}"
                ),
            });
        }
    }
    Ok(())
}

fn closed_form_exponent(
    level: u64,
    x: CyclotomicElement,
    y: CyclotomicElement,
    tag: ConstructionTag,
) -> Result<ExponentResult> {
    let policy = PrecisionPolicy::default();
    let group = GaloisGroup::new(level, GroupMode::RealQuotient)?;
    check_domination(&x, &y, &group, &policy)?;
    let term = RatioTerm::new(y.div(&x)?);
    check_contracting(&term, 0, &policy)?;
    let n = group.order() as u64;
    let (m, bound) = exponent_from_ratios(std::slice::from_ref(&term), n, &policy)?;
    let result = ExponentResult {
        level,
        tag,
        exponent: m,
        ratio_bound: bound,
        threshold: rat(1, n as i64),
    };
    cross_verify(&x, &result, &group)?;
    Ok(result)
}

/// Minimal certified exponent for cos(2 pi / l) + 1 with the closed-form
/// ratio (cos(4 pi / l) + 1) / (cos(2 pi / l) + 1).
pub fn thm31_exponent(level: u64) -> Result<ExponentResult> {
    let x = cos_plus_one_element(level)?;
    // cos(4 pi / l) + 1 built directly: 2 need not be a unit mod l
    let y = CyclotomicElement::root_of_unity(level, 2)
        .add(&CyclotomicElement::root_of_unity(level, -2))?
        .scale(&rat(1, 2))
        .add(&CyclotomicElement::one(level))?;
    closed_form_exponent(level, x, y, ConstructionTag::Thm31)
}

/// Minimal certified exponent for cos(pi / l), odd l >= 5, with the
/// closed-form ratio cos(2 pi / l) / cos(pi / l).
pub fn thm32_exponent(level: u64) -> Result<ExponentResult> {
    let x = cos_half_element(level)?;
    let y = CyclotomicElement::root_of_unity(level, 1)
        .add(&CyclotomicElement::root_of_unity(level, -1))?
        .scale(&rat(1, 2));
    closed_form_exponent(level, x, y, ConstructionTag::Thm32)
}

/// Minimal certified exponent for ax + b where x is a real algebraic integer
/// generating the field and |a| > 2|b|. Per subgroup H, the dominant
/// conjugate of ax + b (unique by hypothesis) normalizes the H-ratios; the
/// result is the max of the per-subgroup minimal exponents, all against the
/// full-degree threshold 1/|G|.
pub fn cor23_exponent(
    x: &CyclotomicElement,
    a: i64,
    b: i64,
    group: &GaloisGroup,
) -> Result<ExponentResult> {
    let policy = PrecisionPolicy::default();
    if b == 0 {
        return Err(Error::InvalidParameter("b must be nonzero".into()));
    }
    if a.unsigned_abs() <= 2 * b.unsigned_abs() {
        return Err(Error::HypothesisViolated {
            detail: format!("need |a| > 2|b|, got a = {a}, b = {b}"),
        });
    }
    if x.level() != group.level() {
        return Err(Error::LevelMismatch { left: x.level(), right: group.level() });
    }
    if !x.is_real() {
        return Err(Error::NotReal);
    }

    // conjugates of x over G, in group-element order
    let mut conjugates = Vec::with_capacity(group.order());
    for &gamma in group.elements() {
        conjugates.push(x.galois_apply(gamma)?);
    }
    // x generates the field iff its conjugates are pairwise distinct
    for i in 0..conjugates.len() {
        for j in i + 1..conjugates.len() {
            if conjugates[i] == conjugates[j] {
                return Err(Error::HypothesisViolated {
                    detail: "element does not generate the field (repeated conjugates)".into(),
                });
            }
        }
    }
    // algebraic integer iff the minimal polynomial prod (T - x^gamma) has
    // integer coefficients; over the generating hypothesis the product over
    // all of G is exactly the minimal polynomial
    let mut min_poly = vec![CyclotomicElement::one(x.level())];
    for conj in &conjugates {
        let mut next = vec![CyclotomicElement::zero(x.level()); min_poly.len() + 1];
        for (i, coeff) in min_poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(coeff)?;
            next[i] = next[i].sub(&coeff.mul(conj)?)?;
        }
        min_poly = next;
    }
    for coeff in &min_poly {
        let ok = coeff.as_rational().is_some_and(|r| r.is_integer());
        if !ok {
            return Err(Error::HypothesisViolated {
                detail: "element is not an algebraic integer".into(),
            });
        }
    }

    // y = ax + b and its conjugates, reusing the conjugate table
    let a_rat = rat(a, 1);
    let b_elem = CyclotomicElement::from_integer(x.level(), b);
    let y_conjugates: Vec<CyclotomicElement> = conjugates
        .iter()
        .map(|c| c.scale(&a_rat).add(&b_elem))
        .collect::<Result<_>>()?;

    let n = group.order() as u64;
    let threshold = rat(1, n as i64);
    let mut best: Option<(u64, Rational)> = None;
    for subgroup in all_subgroups(group)? {
        let (m, bound) = subgroup_exponent(group, &subgroup, &y_conjugates, n, &policy)?;
        if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
            best = Some((m, bound));
        }
    }
    let (m, bound) = best.expect("subgroup list is never empty");
    let result = ExponentResult {
        level: group.level(),
        tag: ConstructionTag::Cor23,
        exponent: m,
        ratio_bound: bound,
        threshold,
    };
    let y = y_conjugates[group
        .elements()
        .iter()
        .position(|&g| g == group.identity())
        .expect("identity is in the group")]
    .clone();
    cross_verify(&y, &result, group)?;
    Ok(result)
}

/// Minimal exponent for the H-orbit of y, normalized by H's dominant
/// conjugate. A certified magnitude tie contradicts the uniqueness argument
/// and is escalated as an internal error.
fn subgroup_exponent(
    group: &GaloisGroup,
    subgroup: &Subgroup,
    y_conjugates: &[CyclotomicElement],
    n: u64,
    policy: &PrecisionPolicy,
) -> Result<(u64, Rational)> {
    let orbit: Vec<&CyclotomicElement> = subgroup
        .elements()
        .iter()
        .map(|&gamma| {
            let idx = group
                .elements()
                .iter()
                .position(|&g| g == gamma)
                .expect("subgroup element belongs to the group");
            &y_conjugates[idx]
        })
        .collect();
    if orbit.len() == 1 {
        return Ok((1, Rational::zero()));
    }
    // locate the unique conjugate of maximal absolute value
    let mut dominant = 0usize;
    for i in 1..orbit.len() {
        let a_sq = orbit[i].mul(orbit[i])?;
        let d_sq = orbit[dominant].mul(orbit[dominant])?;
        let diff = a_sq.sub(&d_sq)?;
        if diff.is_zero() {
            return Err(Error::Internal(format!(
                "two conjugates of ax + b share an absolute value in subgroup {:?}",
                subgroup.elements()
            )));
        }
        if sign_of_real_element(&diff, policy)? == Ordering::Greater {
            dominant = i;
        }
    }
    let mut terms = Vec::new();
    for (i, conj) in orbit.iter().enumerate() {
        if i == dominant {
            continue;
        }
        let term = RatioTerm::new(conj.div(orbit[dominant])?);
        check_contracting(&term, subgroup.elements()[i], policy)?;
        terms.push(term);
    }
    exponent_from_ratios(&terms, n, policy)
}
