//! The discriminant quotient Delta(tau)/Delta(N tau): its exact q-expansion,
//! the product identity tying it to Siegel functions at the indices
//! (0, k/N), and the valuation argument that makes suitable powers of it
//! completely normal for the cyclic group generated by the lower shears
//! (1 0 / t 1) acting on indices.
//!
//! The valuation data is closed-form: with x the quotient and sigma_t the
//! shear,
//!
//!   ord_q(x^sigma_t) - ord_q(x) = -S(N,t)/N,
//!   S(N,t) = 6N sum_{k=1}^{N-1} (B2(<kt/N>) - B2(0)),
//!
//! and normality of x^m for every subgroup needs every gap at a nonidentity
//! shear strictly positive, i.e. every S(N,t) strictly negative.

use num_traits::{One, Zero};

use crate::certificate::{ModularCertificate, ValuationVerdict};
use crate::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rational::{bernoulli2, rat, Rational};
use crate::siegel::{coefficient_level, expand_raw, SiegelIndex};

/// Delta(tau)/Delta(N tau) = q^(1-N) prod_{n>=1} (1-q^n)^24 / (1-q^(Nn))^24
/// as a series with rational coefficients, known below `truncation`.
pub fn delta_ratio_expansion(level: u64, truncation: &Rational) -> Result<QSeries> {
    if level < 2 {
        return Err(Error::DegenerateLevel { level, reason: "the quotient is 1 at N = 1" });
    }
    // window before the q^(1-N) shift
    let t_rel = truncation + rat(level as i64 - 1, 1);
    let numerator = euler_product(1, &t_rel)?.pow(24)?;
    let denominator = euler_product(level as i64, &t_rel)?.pow(24)?;
    Ok(numerator.div(&denominator)?.shift(&rat(1 - level as i64, 1)))
}

/// prod_{n>=1} (1 - q^(step n)) below `truncation`, coefficient level 1.
fn euler_product(step: i64, truncation: &Rational) -> Result<QSeries> {
    let one = CyclotomicElement::one(1);
    let mut series = QSeries::monomial(Rational::zero(), one.clone(), truncation.clone());
    let mut n = step;
    while rat(n, 1) < *truncation {
        let factor = QSeries::monomial(Rational::zero(), one.clone(), truncation.clone()).sub(
            &QSeries::monomial(rat(n, 1), one.clone(), truncation.clone()),
        )?;
        series = series.mul(&factor)?;
        n += step;
    }
    Ok(series)
}

/// Checks the product identity
///
///   Delta(tau)/Delta(N tau) = N^12 prod_{k=1}^{N-1} g_(0,k/N)^(-12)
///
/// term-by-term below `truncation` (the k = N index is integral and carries
/// no factor). Both sides are expanded independently: the left from the
/// Euler products, the right from the Siegel machinery.
pub fn verify_lemma42(level: u64, truncation: &Rational) -> Result<()> {
    if level < 2 {
        return Err(Error::DegenerateLevel { level, reason: "the identity is trivial at N = 1" });
    }
    if *truncation <= rat(1 - (level as i64), 1) {
        return Err(Error::TruncationTooSmall { truncation: truncation.clone() });
    }
    // slack so the inversion of the order-(N-1) product still covers the
    // requested window
    let t_g = truncation + rat(level as i64, 1);
    let m = coefficient_level(level);
    let mut product =
        QSeries::monomial(Rational::zero(), CyclotomicElement::one(m), t_g.clone());
    for k in 1..level {
        let index = SiegelIndex::new(rat(0, 1), rat(k as i64, level as i64), level)?;
        product = product.mul(&expand_raw(&index, &t_g)?)?;
    }
    let scale = CyclotomicElement::from_rational(m, power_of_level(level, 12));
    let rhs = product.pow(12)?.invert()?.scale(&scale)?;

    let lhs = delta_ratio_expansion(level, truncation)?.lift_coefficients(m)?;
    if rhs.truncation() < truncation || lhs.truncation() < truncation {
        return Err(Error::TruncationTooSmall {
            truncation: rhs.truncation().min(lhs.truncation()).clone(),
        });
    }
    lhs.equal_to_truncation(&rhs)
}

fn power_of_level(level: u64, exponent: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exponent {
        out *= rat(level as i64, 1);
    }
    out
}

/// S(N,t) = 6N sum_{k=1}^{N-1} (B2(<kt/N>) - B2(0)).
pub fn thm44_exponent_sum(level: u64, t: u64) -> Rational {
    let b2_zero = bernoulli2(&Rational::zero());
    let mut sum = Rational::zero();
    for k in 1..level {
        let arg = rat((k * t % level) as i64, level as i64);
        sum += bernoulli2(&arg) - &b2_zero;
    }
    sum * rat(6 * level as i64, 1)
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Valuation proof of complete normality for the discriminant quotient at
/// one level: every exponent sum S(N,t), t = 1..N-1, must be strictly
/// negative (error `ValuationNotStrict` otherwise), which makes the
/// identity coset strictly dominant in every subgroup of the shear group
/// Z/N. The quotient itself is expanded below `truncation` and its q-order
/// checked against the predicted 1 - N.
pub fn verify_thm44(level: u64, truncation: &Rational) -> Result<ModularCertificate> {
    if level < 2 {
        return Err(Error::DegenerateLevel { level, reason: "the shear group is trivial at N = 1" });
    }
    if *truncation <= rat(1 - (level as i64), 1) {
        return Err(Error::TruncationTooSmall { truncation: truncation.clone() });
    }

    let mut exponent_sums = Vec::with_capacity(level as usize - 1);
    for t in 1..level {
        let s = thm44_exponent_sum(level, t);
        if s >= Rational::zero() {
            return Err(Error::ValuationNotStrict { n: level, t });
        }
        exponent_sums.push((t, s));
    }

    let mut subgroups = Vec::new();
    for m in divisors(level) {
        let elements: Vec<u64> = (0..level).step_by(m as usize).collect();
        let order_gaps: Vec<Rational> = elements
            .iter()
            .filter(|&&t| t != 0)
            .map(|&t| -&exponent_sums[t as usize - 1].1 / rat(level as i64, 1))
            .collect();
        let identity_dominates = order_gaps.iter().all(|g| *g > Rational::zero());
        subgroups.push(ValuationVerdict { subgroup: elements, order_gaps, identity_dominates });
    }

    let series = delta_ratio_expansion(level, truncation)?;
    let series_order = series.q_order()?;
    if series_order != rat(1 - (level as i64), 1) {
        return Err(Error::Internal(format!(
            "discriminant quotient at level {level} has q-order {series_order}, expected {}",
            1 - (level as i64)
        )));
    }

    Ok(ModularCertificate::new(
        level,
        truncation.clone(),
        series_order,
        exponent_sums,
        subgroups,
    ))
}
