//! Randomized structural invariants of the arithmetic layers: field axioms,
//! automorphism and lifting laws, enclosure behaviour of numeric evaluation,
//! and the q-order grading.

use num_traits::Zero;
use proptest::prelude::*;

use normal_core::cyclotomic::{cyclotomic_polynomial, CyclotomicElement};
use normal_core::elements::sqrt_minus_t;
use normal_core::galois::{all_subgroups, euler_phi, GaloisGroup, GroupMode};
use normal_core::interval::cos_sin_2pi;
use normal_core::qseries::QSeries;
use normal_core::rational::{rat, Rational};

const LEVELS: [u64; 8] = [5, 7, 8, 9, 12, 15, 16, 40];

fn coords(phi: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-3i64..=3i64, 1i64..=2i64), phi)
        .prop_map(|pairs| pairs.into_iter().map(|(n, d)| rat(n, d)).collect())
}

/// Three same-level elements plus a unit t of (Z/l)^* picked by index.
fn triple() -> impl Strategy<Value = (CyclotomicElement, CyclotomicElement, CyclotomicElement, u64, u64)>
{
    proptest::sample::select(&LEVELS[..]).prop_flat_map(|level| {
        let phi = euler_phi(level) as usize;
        (
            coords(phi),
            coords(phi),
            coords(phi),
            0..phi,
            0..phi,
        )
            .prop_map(move |(a, b, c, ti, si)| {
                let group = GaloisGroup::new(level, GroupMode::Full).unwrap();
                let t = group.elements()[ti];
                let s = group.elements()[si];
                (
                    CyclotomicElement::new(level, a).unwrap(),
                    CyclotomicElement::new(level, b).unwrap(),
                    CyclotomicElement::new(level, c).unwrap(),
                    t,
                    s,
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((a, b, c, _, _) in triple()) {
        let ab = a.add(&b).unwrap();
        prop_assert_eq!(&ab, &b.add(&a).unwrap());
        prop_assert_eq!(ab.add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.mul(&a).unwrap());
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        if !a.is_zero() {
            let one = CyclotomicElement::one(a.level());
            prop_assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), one);
        }
    }

    #[test]
    fn automorphism_laws((a, b, _, t, s) in triple()) {
        let level = a.level();
        prop_assert_eq!(a.galois_apply(1).unwrap(), a.clone());
        prop_assert_eq!(
            a.add(&b).unwrap().galois_apply(t).unwrap(),
            a.galois_apply(t).unwrap().add(&b.galois_apply(t).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.mul(&b).unwrap().galois_apply(t).unwrap(),
            a.galois_apply(t).unwrap().mul(&b.galois_apply(t).unwrap()).unwrap()
        );
        let st = (s as u128 * t as u128 % level as u128) as u64;
        prop_assert_eq!(
            a.galois_apply(s).unwrap().galois_apply(t).unwrap(),
            a.galois_apply(st).unwrap()
        );
    }

    #[test]
    fn lift_commutes_with_arithmetic(
        (sub, target) in proptest::sample::select(&[(5u64, 15u64), (5, 20), (7, 21), (8, 24), (4, 20), (3, 15)][..]),
        raw_a in coords(16),
        raw_b in coords(16),
    ) {
        let phi = euler_phi(sub) as usize;
        let a = CyclotomicElement::new(sub, raw_a[..phi].to_vec()).unwrap();
        let b = CyclotomicElement::new(sub, raw_b[..phi].to_vec()).unwrap();
        prop_assert_eq!(
            a.mul(&b).unwrap().lift_level(target).unwrap(),
            a.lift_level(target).unwrap().mul(&b.lift_level(target).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.add(&b).unwrap().lift_level(target).unwrap(),
            a.lift_level(target).unwrap().add(&b.lift_level(target).unwrap()).unwrap()
        );
    }

    #[test]
    fn numeric_enclosures_refine((a, _, _, _, _) in triple()) {
        // doubling precision keeps the enclosure consistent (same truth
        // inside) and no wider
        let coarse = a.numeric_eval(32, 1).unwrap();
        let fine = a.numeric_eval(64, 1).unwrap();
        prop_assert!(coarse.re().lo() <= fine.re().hi() && fine.re().lo() <= coarse.re().hi());
        prop_assert!(coarse.im().lo() <= fine.im().hi() && fine.im().lo() <= coarse.im().hi());
        prop_assert!(fine.width() <= coarse.width());
    }

    #[test]
    fn rational_points_are_enclosed(n in -6i64..=6, d in 1i64..=4) {
        let value = rat(n, d);
        let x = CyclotomicElement::from_rational(8, value.clone());
        let boxed = x.numeric_eval(64, 1).unwrap();
        prop_assert!(boxed.contains(&value, &Rational::zero()));
    }

    #[test]
    fn q_order_is_additive(
        ea in proptest::collection::btree_set((-4i64..=8, 1i64..=3), 1..5),
        eb in proptest::collection::btree_set((-4i64..=8, 1i64..=3), 1..5),
    ) {
        // coefficient level 1: rational coefficients form an integral
        // domain, so leading terms cannot cancel
        let build = |exps: std::collections::BTreeSet<(i64, i64)>| {
            let mut s = QSeries::zero(1, rat(30, 1));
            for (n, d) in exps {
                let mono = QSeries::monomial(
                    rat(n, d),
                    CyclotomicElement::one(1),
                    rat(30, 1),
                );
                s = s.add(&mono).unwrap();
            }
            s
        };
        let a = build(ea);
        let b = build(eb);
        let sum = a.q_order().unwrap() + b.q_order().unwrap();
        prop_assert_eq!(a.mul(&b).unwrap().q_order().unwrap(), sum);
    }
}

#[test]
fn cyclotomic_polynomial_annihilates_its_root() {
    for level in 1..=60u64 {
        let coeffs = cyclotomic_polynomial(level);
        let zeta = CyclotomicElement::root_of_unity(level, 1);
        let mut acc = CyclotomicElement::zero(level);
        // Horner from the top coefficient
        for c in coeffs.iter().rev() {
            let c = Rational::from(c.clone());
            acc = acc.mul(&zeta).unwrap().add(&CyclotomicElement::from_rational(level, c)).unwrap();
        }
        assert!(acc.is_zero(), "Phi_{level}(zeta_{level}) != 0");
    }
}

#[test]
fn gauss_square_roots_to_one_hundred() {
    let mut checked = 0;
    for t in (3..=100u64).filter(|&t| t == 4 || (t % 4 == 3 && is_prime(t))) {
        let s = sqrt_minus_t(t).unwrap();
        assert_eq!(
            s.mul(&s).unwrap(),
            CyclotomicElement::from_integer(s.level(), -(t as i64))
        );
        checked += 1;
    }
    assert!(checked >= 12);
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn subgroup_orders_divide_group_order() {
    for level in 3..=40u64 {
        for mode in [GroupMode::Full, GroupMode::RealQuotient] {
            let Ok(group) = GaloisGroup::new(level, mode) else {
                continue; // real quotient rejects degenerate levels
            };
            for subgroup in all_subgroups(&group).unwrap() {
                assert_eq!(group.order() % subgroup.order(), 0, "level {level}");
            }
        }
    }
}

#[test]
fn real_quotient_degree_formula() {
    for level in 5..=40u64 {
        if [6u64].contains(&level) {
            continue;
        }
        let group = GaloisGroup::new(level, GroupMode::RealQuotient).unwrap();
        assert_eq!(group.order() as u64, euler_phi(level) / 2, "level {level}");
    }
}

#[test]
fn float_reference_is_near_the_enclosure() {
    // independent implementation check: the libm cosine lies within a
    // coarse tolerance of the exact dyadic enclosure
    let tolerance = rat(1, 1 << 20);
    for level in [5u64, 7, 12, 16] {
        for k in 1..level {
            let (re, _) = cos_sin_2pi(&rat(k as i64, level as i64), 64);
            let reference = (std::f64::consts::TAU * k as f64 / level as f64).cos();
            let reference = Rational::from_float(reference).unwrap();
            let below = re.lo() - &tolerance;
            let above = re.hi() + &tolerance;
            assert!(
                below <= reference && reference <= above,
                "cos(2 pi {k}/{level}) drifted from its enclosure"
            );
        }
    }
}

#[test]
fn real_elements_have_thin_imaginary_part() {
    // a real element's imaginary enclosure must pin zero
    let x = normal_core::elements::cos_plus_one_element(11).unwrap();
    assert!(x.is_real());
    let boxed = x.numeric_eval(128, 1).unwrap();
    assert!(boxed.im().contains(&Rational::zero()));
    assert!(boxed.im().width() < rat(1, 1 << 30));
}
