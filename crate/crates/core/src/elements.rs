//! The explicit field elements whose powers get verified.
//!
//! All three constructions are exact coordinate vectors:
//!   * `cos_plus_one_element(l)`  = (zeta + zeta^-1)/2 + 1   = cos(2 pi / l) + 1
//!   * `cos_half_element(l)`     = -(zeta^((l-1)/2) + zeta^-((l-1)/2))/2
//!                                = cos(pi / l)              (l odd)
//!   * `sqrt_minus_t(t)`          = a square root of -t in Q(zeta_t)
//!     (quadratic Gauss sum for odd prime t = 3 mod 4, and 2 zeta_4 for t = 4)

use crate::arith::is_prime_u64;
use crate::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};
use crate::rational::rat;

/// Levels at which cos(2 pi / l) + 1 is rational and the real subfield
/// degenerates to Q; the constructions exclude them.
pub const DEGENERATE_LEVELS: [u64; 5] = [1, 2, 3, 4, 6];

fn reject_degenerate(level: u64) -> Result<()> {
    if DEGENERATE_LEVELS.contains(&level) {
        return Err(Error::DegenerateLevel {
            level,
            reason: "cos(2 pi / l) + 1 is rational; the real subfield is Q",
        });
    }
    Ok(())
}

/// `cos(2 pi / l) + 1` as an element of Q(zeta_l).
pub fn cos_plus_one_element(level: u64) -> Result<CyclotomicElement> {
    reject_degenerate(level)?;
    let z = CyclotomicElement::root_of_unity(level, 1);
    let zi = CyclotomicElement::root_of_unity(level, -1);
    let cos = z.add(&zi)?.scale(&rat(1, 2));
    cos.add(&CyclotomicElement::one(level))
}

/// `cos(pi / l)` as an element of Q(zeta_l), for odd `l >= 5`.
///
/// Uses `cos(pi / l) = -cos(pi (l - 1) / l) = -(zeta^s + zeta^-s)/2` with
/// `s = (l - 1)/2`; only odd l puts pi / l in the lattice of angles of
/// Q(zeta_l) without doubling the level.
pub fn cos_half_element(level: u64) -> Result<CyclotomicElement> {
    if level % 2 == 0 || level < 5 {
        return Err(Error::DegenerateLevel {
            level,
            reason: "cos(pi / l) requires odd l >= 5 at this level",
        });
    }
    let s = ((level - 1) / 2) as i64;
    let z = CyclotomicElement::root_of_unity(level, s);
    let zi = CyclotomicElement::root_of_unity(level, -s);
    Ok(z.add(&zi)?.scale(&rat(-1, 2)))
}

/// Legendre symbol (a | p) for an odd prime p, via Euler's criterion.
fn legendre(a: u64, p: u64) -> i64 {
    let mut result: u64 = 1;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else if result == p - 1 {
        -1
    } else {
        0
    }
}

/// A square root of `-t` inside Q(zeta_t), for `t = 4` or an odd prime
/// `t = 3 (mod 4)`.
///
/// For prime t the quadratic Gauss sum `g = sum_a (a|t) zeta_t^a` satisfies
/// `g^2 = (-1|t) t = -t` exactly; nothing about the sign of g itself is
/// assumed anywhere. For t = 4 the element is `2 zeta_4`.
pub fn sqrt_minus_t(t: u64) -> Result<CyclotomicElement> {
    if t == 4 {
        return Ok(CyclotomicElement::root_of_unity(4, 1).scale(&rat(2, 1)));
    }
    if t % 4 != 3 || !is_prime_u64(t) {
        return Err(Error::QuadraticShape { t });
    }
    let mut acc = CyclotomicElement::zero(t);
    for a in 1..t {
        let term = CyclotomicElement::root_of_unity(t, a as i64);
        acc = match legendre(a, t) {
            1 => acc.add(&term)?,
            -1 => acc.sub(&term)?,
            _ => unreachable!("a runs over units mod prime t"),
        };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    #[test]
    fn cos_plus_one_at_five() {
        // (zeta + zeta^4)/2 + 1 = 1/2 - zeta^2/2 - zeta^3/2 on the power basis
        let x = cos_plus_one_element(5).unwrap();
        let expected = CyclotomicElement::new(
            5,
            vec![rat(1, 2), rat_int(0), rat(-1, 2), rat(-1, 2)],
        )
        .unwrap();
        assert_eq!(x, expected);
        assert!(x.is_real());
    }

    #[test]
    fn cos_half_at_five() {
        // -(zeta^2 + zeta^3)/2, which embeds to cos(pi/5) = 0.809016...
        let x = cos_half_element(5).unwrap();
        let expected = CyclotomicElement::new(
            5,
            vec![rat_int(0), rat_int(0), rat(-1, 2), rat(-1, 2)],
        )
        .unwrap();
        assert_eq!(x, expected);
        assert!(x.is_real());
    }

    #[test]
    fn degenerate_levels_rejected() {
        for level in DEGENERATE_LEVELS {
            assert!(cos_plus_one_element(level).is_err());
        }
        assert!(cos_plus_one_element(5).is_ok());
        assert!(cos_half_element(6).is_err());
        assert!(cos_half_element(3).is_err());
        assert!(cos_half_element(9).is_ok());
    }

    #[test]
    fn sqrt_minus_t_small_cases() {
        // t = 3: zeta_3 - zeta_3^2 = 1 + 2 zeta_3 on the power basis
        let s3 = sqrt_minus_t(3).unwrap();
        assert_eq!(
            s3,
            CyclotomicElement::new(3, vec![rat_int(1), rat_int(2)]).unwrap()
        );
        // t = 4: 2 zeta_4
        let s4 = sqrt_minus_t(4).unwrap();
        assert_eq!(
            s4,
            CyclotomicElement::new(4, vec![rat_int(0), rat_int(2)]).unwrap()
        );
    }

    #[test]
    fn squares_to_minus_t() {
        for t in [3u64, 4, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83] {
            let s = sqrt_minus_t(t).unwrap();
            let sq = s.mul(&s).unwrap();
            assert_eq!(
                sq,
                CyclotomicElement::from_integer(s.level(), -(t as i64)),
                "sqrt(-{t})^2 != -{t}"
            );
        }
    }

    #[test]
    fn bad_quadratic_shapes_rejected() {
        for t in [5u64, 8, 9, 13, 15, 21] {
            assert!(sqrt_minus_t(t).is_err(), "t = {t} should be rejected");
        }
    }
}
