//! Two independent normality oracles, and the composite-product check.
//!
//! An element x is normal for a subgroup H of the Galois group when its
//! H-conjugates are linearly independent over the fixed field. Two exact
//! tests detect this:
//!
//! * character sums: x is normal iff `sum_{gamma in H} chi(gamma^-1) x^gamma`
//!   is nonzero for every character chi of H (the sums are the projections of
//!   x onto the chi-eigenspaces of the group algebra);
//! * the group determinant: x is normal iff `det[ x^(gamma delta) ]` over all
//!   pairs in H is nonzero.
//!
//! The two tests are mathematically equivalent but computed along disjoint
//! code paths (lifted-level root-of-unity sums vs. fraction-free elimination
//! at the base level), so running both and demanding agreement is a strong
//! self-check. Disagreement is reported as a hard error, never glossed over.

use crate::certificate::{NormalityCertificate, SubgroupVerdict};
use crate::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};
use crate::galois::{all_subgroups, characters, Character, GaloisGroup, GroupMode, Subgroup};

fn lcm_u64(a: u64, b: u64) -> u64 {
    crate::arith::lcm_u64(a, b)
}

fn check_compatible(x: &CyclotomicElement, level: u64, mode: GroupMode) -> Result<()> {
    if x.level() != level {
        return Err(Error::LevelMismatch { left: x.level(), right: level });
    }
    // In the real-quotient mode a class {t, l-t} only acts well on elements
    // fixed by conjugation.
    if mode == GroupMode::RealQuotient && !x.is_real() {
        return Err(Error::NotReal);
    }
    Ok(())
}

/// `sum_{gamma in H} chi(gamma^-1) x^gamma`, computed in the compositum
/// `Q(zeta_lcm(l, d))` where d is the order of chi's value group.
pub fn character_sum(
    x: &CyclotomicElement,
    subgroup: &Subgroup,
    chi: &Character,
) -> Result<CyclotomicElement> {
    check_compatible(x, subgroup.level(), subgroup.mode())?;
    let d = chi.modulus();
    let lifted_level = lcm_u64(x.level(), d);
    let stride = (lifted_level / d) as i64;
    let mut sum = CyclotomicElement::zero(lifted_level);
    for &gamma in subgroup.elements() {
        let conj = x.galois_apply(gamma)?.lift_level(lifted_level)?;
        // chi(gamma^-1) = zeta_d^(-e(gamma))
        let value = CyclotomicElement::root_of_unity(
            lifted_level,
            -stride * chi.exponent_of(gamma) as i64,
        );
        sum = sum.add(&conj.mul(&value)?)?;
    }
    Ok(sum)
}

/// Outcome of the character-sum test, with the vanishing characters (indices
/// into `characters(H)` in its canonical order) as evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityEvidence {
    pub normal: bool,
    pub vanishing_characters: Vec<usize>,
}

/// Character-sum normality test: x is normal for H iff every character sum
/// is nonzero.
pub fn is_normal(x: &CyclotomicElement, subgroup: &Subgroup) -> Result<NormalityEvidence> {
    check_compatible(x, subgroup.level(), subgroup.mode())?;
    let mut vanishing = Vec::new();
    for (idx, chi) in characters(subgroup).iter().enumerate() {
        if character_sum(x, subgroup, chi)?.is_zero() {
            vanishing.push(idx);
        }
    }
    Ok(NormalityEvidence { normal: vanishing.is_empty(), vanishing_characters: vanishing })
}

/// The group determinant `det[ x^(gamma delta) ]_{gamma, delta in H}`,
/// by fraction-free (Bareiss) elimination: every division is by a previous
/// pivot and is exact.
pub fn group_determinant(x: &CyclotomicElement, subgroup: &Subgroup) -> Result<CyclotomicElement> {
    check_compatible(x, subgroup.level(), subgroup.mode())?;
    let elems = subgroup.elements();
    let n = elems.len();
    let conjugate_of = |t: u64| x.galois_apply(t);
    let mut matrix: Vec<Vec<CyclotomicElement>> = Vec::with_capacity(n);
    for &g in elems {
        let mut row = Vec::with_capacity(n);
        for &h in elems {
            row.push(conjugate_of(subgroup.mul(g, h))?);
        }
        matrix.push(row);
    }

    let mut sign_flip = false;
    let mut prev_pivot = CyclotomicElement::one(x.level());
    for k in 0..n {
        let pivot_row = (k..n).find(|&r| !matrix[r][k].is_zero());
        let Some(r) = pivot_row else {
            return Ok(CyclotomicElement::zero(x.level()));
        };
        if r != k {
            matrix.swap(r, k);
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = matrix[k][k]
                    .mul(&matrix[i][j])?
                    .sub(&matrix[i][k].mul(&matrix[k][j])?)?;
                matrix[i][j] = num.div(&prev_pivot)?;
            }
            matrix[i][k] = CyclotomicElement::zero(x.level());
        }
        prev_pivot = matrix[k][k].clone();
    }
    let det = matrix[n - 1][n - 1].clone();
    Ok(if sign_flip { det.neg() } else { det })
}

/// Group-determinant normality test (independent of the character-sum path).
pub fn is_normal_determinant(x: &CyclotomicElement, subgroup: &Subgroup) -> Result<bool> {
    Ok(!group_determinant(x, subgroup)?.is_zero())
}

/// Runs BOTH normality tests on every subgroup of G and assembles a
/// certificate. The two oracles must agree on every subgroup; disagreement
/// surfaces as an error rather than a verdict.
pub fn is_completely_normal(
    x: &CyclotomicElement,
    group: &GaloisGroup,
) -> Result<NormalityCertificate> {
    is_completely_normal_power(x, 1, group)
}

/// Same, for `x^exponent`; the certificate records the exponent.
pub fn is_completely_normal_power(
    x: &CyclotomicElement,
    exponent: u64,
    group: &GaloisGroup,
) -> Result<NormalityCertificate> {
    if exponent == 0 {
        return Err(Error::InvalidParameter("exponent must be positive".into()));
    }
    check_compatible(x, group.level(), group.mode())?;
    let y = if exponent == 1 { x.clone() } else { x.pow(exponent) };
    let mut verdicts = Vec::new();
    for subgroup in all_subgroups(group)? {
        let evidence = is_normal(&y, &subgroup)?;
        let det_ok = is_normal_determinant(&y, &subgroup)?;
        if evidence.normal != det_ok {
            return Err(Error::OracleDisagreement { subgroup: subgroup.elements().to_vec() });
        }
        verdicts.push(SubgroupVerdict {
            subgroup: subgroup.elements().to_vec(),
            character_sums_nonzero: evidence.normal,
            determinant_nonzero: det_ok,
            vanishing_characters: evidence.vanishing_characters,
        });
    }
    Ok(NormalityCertificate::new(
        group.level(),
        group.mode(),
        y,
        exponent,
        verdicts,
    ))
}

/// The subgroup of G fixing x pointwise.
pub fn stabilizer(x: &CyclotomicElement, group: &GaloisGroup) -> Result<Subgroup> {
    check_compatible(x, group.level(), group.mode())?;
    let mut fixed = Vec::new();
    for &gamma in group.elements() {
        if &x.galois_apply(gamma)? == x {
            fixed.push(gamma);
        }
    }
    Subgroup::new(group, &fixed)
}

/// Product-of-normal-elements check: lifts x1 and x2 to the compositum
/// level, verifies that the fields they generate are linearly disjoint
/// (degree of the compositum = product of degrees, computed from stabilizer
/// orders), and tests normality of x1*x2 over the full Galois group.
pub fn composite_normal_check(
    x1: &CyclotomicElement,
    x2: &CyclotomicElement,
    level: u64,
) -> Result<NormalityEvidence> {
    for x in [x1, x2] {
        if level % x.level() != 0 {
            return Err(Error::NotDivisor { sub: x.level(), level });
        }
    }
    let group = GaloisGroup::new(level, GroupMode::Full)?;
    let y1 = x1.lift_level(level)?;
    let y2 = x2.lift_level(level)?;
    let s1 = stabilizer(&y1, &group)?;
    let s2 = stabilizer(&y2, &group)?;
    let meet: Vec<u64> = s1
        .elements()
        .iter()
        .copied()
        .filter(|&g| s2.contains(g))
        .collect();
    let n = group.order();
    let d1 = n / s1.order();
    let d2 = n / s2.order();
    let compositum_degree = n / meet.len();
    if d1 * d2 != compositum_degree {
        return Err(Error::DisjointnessViolated { d1, d2, compositum: compositum_degree });
    }
    is_normal(&y1.mul(&y2)?, &group.full_subgroup())
}
