//! Galois groups of cyclotomic fields, their subgroup lattices, and the
//! characters of those subgroups.
//!
//! `Gal(Q(zeta_l)/Q) = (Z/lZ)^x` acts by `zeta -> zeta^t`. Two modes:
//! the full unit group, and the quotient `(Z/lZ)^x / {+-1}` that is the
//! Galois group of the maximal real subfield. In the quotient mode a class
//! `{t, l-t}` is represented canonically by `min(t, l-t)`, which lies in
//! `[1, l/2]`.
//!
//! Characters of a subgroup H are exponent maps into the `d`-th roots of
//! unity where `d = exp(H)`; they are built by extending along a greedy
//! generator chain (each extension solves one linear congruence), which
//! yields exactly |H| characters.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{euler_phi_u64, gcd_u64, lcm_u64};
use crate::error::{Error, Result};

/// Default cap on the group order for lattice enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 512;

pub fn euler_phi(n: u64) -> u64 {
    euler_phi_u64(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupMode {
    /// `(Z/lZ)^x`, the Galois group of Q(zeta_l)/Q.
    Full,
    /// `(Z/lZ)^x / {+-1}`, the Galois group of the maximal real subfield.
    RealQuotient,
}

/// Shared element calculus for a `(level, mode)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ops {
    level: u64,
    mode: GroupMode,
}

impl Ops {
    fn canonical(&self, t: u64) -> u64 {
        let r = t % self.level;
        match self.mode {
            GroupMode::Full => r,
            GroupMode::RealQuotient => r.min(self.level - r),
        }
    }

    fn identity(&self) -> u64 {
        if self.level == 1 {
            0
        } else {
            1
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.level == 1 {
            return 0;
        }
        self.canonical((a as u128 * b as u128 % self.level as u128) as u64)
    }

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = self.identity();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn element_order(&self, a: u64) -> u64 {
        let mut x = a;
        let mut n = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    fn inverse(&self, a: u64) -> u64 {
        self.pow(a, self.element_order(a) - 1)
    }

    /// Closure of a set under products (finite group, so this suffices).
    fn closure(&self, seed: &BTreeSet<u64>) -> BTreeSet<u64> {
        let mut set = seed.clone();
        set.insert(self.identity());
        let mut frontier: Vec<u64> = set.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            let members: Vec<u64> = set.iter().copied().collect();
            for y in members {
                let p = self.mul(x, y);
                if set.insert(p) {
                    frontier.push(p);
                }
            }
        }
        set
    }
}

/// The Galois group of Q(zeta_l)/Q or of its maximal real subfield,
/// as a sorted list of canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisGroup {
    ops: Ops,
    elements: Vec<u64>,
}

impl GaloisGroup {
    pub fn new(level: u64, mode: GroupMode) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        if mode == GroupMode::RealQuotient && level < 3 {
            return Err(Error::DegenerateLevel {
                level,
                reason: "the real quotient needs l >= 3 (complex conjugation must be nontrivial)",
            });
        }
        let ops = Ops { level, mode };
        let mut set = BTreeSet::new();
        if level == 1 {
            set.insert(0);
        } else {
            for t in 1..=level / 2 {
                if gcd_u64(t, level) == 1 {
                    set.insert(ops.canonical(t));
                    if mode == GroupMode::Full {
                        set.insert(level - t);
                    }
                }
            }
            if mode == GroupMode::Full && level == 2 {
                set.insert(1);
            }
        }
        Ok(GaloisGroup { ops, elements: set.into_iter().collect() })
    }

    pub fn level(&self) -> u64 {
        self.ops.level
    }

    pub fn mode(&self) -> GroupMode {
        self.ops.mode
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> u64 {
        self.ops.identity()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn contains(&self, t: u64) -> bool {
        self.elements.binary_search(&self.ops.canonical(t % self.ops.level)).is_ok()
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.ops.mul(a, b)
    }

    pub fn inverse(&self, a: u64) -> u64 {
        self.ops.inverse(a)
    }

    pub fn element_order(&self, a: u64) -> u64 {
        self.ops.element_order(a)
    }

    /// The whole group viewed as its own (top) subgroup.
    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup { ops: self.ops, elements: self.elements.clone() }
    }
}

/// A subgroup of a `GaloisGroup`, canonical-representative elements sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgroup {
    ops: Ops,
    elements: Vec<u64>,
}

impl Subgroup {
    /// Wrap an element set, verifying the subgroup axioms.
    pub fn new(group: &GaloisGroup, elements: &[u64]) -> Result<Self> {
        let ops = group.ops;
        let set: BTreeSet<u64> = elements.iter().map(|&t| ops.canonical(t)).collect();
        for &t in &set {
            if !group.contains(t) {
                return Err(Error::InvalidParameter(format!(
                    "{t} is not an element of the ambient group"
                )));
            }
        }
        if !set.contains(&ops.identity()) {
            return Err(Error::InvalidParameter("subgroup must contain the identity".into()));
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&ops.mul(a, b)) {
                    return Err(Error::InvalidParameter(format!(
                        "set is not closed: {a} * {b} escapes"
                    )));
                }
            }
        }
        Ok(Subgroup { ops, elements: set.into_iter().collect() })
    }

    /// Subgroup generated by a set (always well formed).
    pub fn generated_by(group: &GaloisGroup, generators: &[u64]) -> Self {
        let ops = group.ops;
        let seed: BTreeSet<u64> = generators.iter().map(|&t| ops.canonical(t)).collect();
        Subgroup { ops, elements: ops.closure(&seed).into_iter().collect() }
    }

    pub fn level(&self) -> u64 {
        self.ops.level
    }

    pub fn mode(&self) -> GroupMode {
        self.ops.mode
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> u64 {
        self.ops.identity()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn contains(&self, t: u64) -> bool {
        self.elements.binary_search(&self.ops.canonical(t % self.ops.level)).is_ok()
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.ops.mul(a, b)
    }

    pub fn inverse(&self, a: u64) -> u64 {
        self.ops.inverse(a)
    }

    /// exp(H): the lcm of the element orders.
    pub fn exponent(&self) -> u64 {
        self.elements
            .iter()
            .map(|&a| self.ops.element_order(a))
            .fold(1, lcm_u64)
    }
}

/// Every subgroup of `group`, sorted by (order, elements).
///
/// Seeds with all cyclic subgroups and joins pairs until a fixpoint; since
/// every subgroup of an abelian group is the join of the cyclic subgroups
/// of its elements, the fixpoint is the complete lattice.
pub fn all_subgroups(group: &GaloisGroup) -> Result<Vec<Subgroup>> {
    all_subgroups_bounded(group, DEFAULT_ENUMERATION_BOUND)
}

pub fn all_subgroups_bounded(group: &GaloisGroup, bound: usize) -> Result<Vec<Subgroup>> {
    if group.order() > bound {
        return Err(Error::EnumerationBound { order: group.order(), bound });
    }
    let ops = group.ops;
    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    for &g in &group.elements {
        let cyc = ops.closure(&BTreeSet::from([g]));
        found.insert(cyc.into_iter().collect());
    }
    loop {
        let snapshot: Vec<Vec<u64>> = found.iter().cloned().collect();
        let mut grew = false;
        for i in 0..snapshot.len() {
            for j in i + 1..snapshot.len() {
                let seed: BTreeSet<u64> =
                    snapshot[i].iter().chain(&snapshot[j]).copied().collect();
                let join: Vec<u64> = ops.closure(&seed).into_iter().collect();
                grew |= found.insert(join);
            }
        }
        if !grew {
            break;
        }
    }
    let mut subs: Vec<Subgroup> = found
        .into_iter()
        .map(|elements| Subgroup { ops, elements })
        .collect();
    subs.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(subs)
}

// ---------------------------------------------------------------------------
// characters
// ---------------------------------------------------------------------------

/// A character of a subgroup H, valued in the d-th roots of unity with
/// `d = exp(H)`: `chi(gamma) = zeta_d^(exponents[gamma])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    modulus: u64,
    exponents: BTreeMap<u64, u64>,
}

impl Character {
    /// d, the order of the root-of-unity target.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The exponent `e` with `chi(gamma) = zeta_d^e`.
    pub fn exponent_of(&self, gamma: u64) -> u64 {
        self.exponents[&gamma]
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.values().all(|&e| e == 0)
    }
}

fn mod_inverse(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    // extended Euclid on (a, n); a is invertible by construction here
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(n as i128) as u64
}

/// The full character group of H (exactly |H| characters), sorted by their
/// exponent vectors on a fixed generator chain.
pub fn characters(subgroup: &Subgroup) -> Vec<Character> {
    let ops = subgroup.ops;
    let m = subgroup.exponent();

    // greedy generator chain with relative orders, plus normal forms
    let mut gens: Vec<u64> = Vec::new();
    let mut rel_orders: Vec<u64> = Vec::new();
    let mut rel_targets: Vec<u64> = Vec::new(); // gen_k^(r_k), an element of the previous stage
    let mut nf: BTreeMap<u64, Vec<u64>> = BTreeMap::from([(ops.identity(), Vec::new())]);
    for &e in &subgroup.elements {
        if nf.contains_key(&e) {
            continue;
        }
        let mut r = 1;
        while !nf.contains_key(&ops.pow(e, r)) {
            r += 1;
        }
        let current: Vec<(u64, Vec<u64>)> = nf.iter().map(|(k, v)| (*k, v.clone())).collect();
        for (h, vec) in current {
            for a in 1..r {
                let mut v = vec.clone();
                v.push(a);
                nf.insert(ops.mul(h, ops.pow(e, a)), v);
            }
        }
        let k = gens.len();
        for v in nf.values_mut() {
            while v.len() <= k {
                v.push(0);
            }
        }
        gens.push(e);
        rel_orders.push(r);
        rel_targets.push(ops.pow(e, r));
    }
    debug_assert_eq!(nf.len(), subgroup.order());

    // extend characters generator by generator: chi(gen_k) = zeta_m^x with
    // r_k * x = chi(gen_k^(r_k))  (mod m)
    let mut partial: Vec<Vec<u64>> = vec![Vec::new()];
    for k in 0..gens.len() {
        let r = rel_orders[k];
        let target_nf = &nf[&rel_targets[k]];
        let mut next: Vec<Vec<u64>> = Vec::new();
        for e in &partial {
            let c = target_nf
                .iter()
                .take(k)
                .zip(e)
                .fold(0u64, |acc, (&a, &x)| {
                    ((acc as u128 + a as u128 * x as u128) % m as u128) as u64
                });
            let g = gcd_u64(r % m, m);
            if c % g != 0 {
                continue; // this character does not extend along the chain
            }
            let step = m / g;
            let x0 = (c / g % step) as u128 * mod_inverse(r / g % step, step) as u128
                % step as u128;
            for t in 0..g {
                let mut v = e.clone();
                v.push((x0 as u64 + t * step) % m);
                next.push(v);
            }
        }
        partial = next;
    }
    debug_assert_eq!(partial.len(), subgroup.order());

    partial.sort();
    partial
        .into_iter()
        .map(|e| {
            let exponents = nf
                .iter()
                .map(|(elem, v)| {
                    let exp = v.iter().zip(&e).fold(0u64, |acc, (&a, &x)| {
                        ((acc as u128 + a as u128 * x as u128) % m as u128) as u64
                    });
                    (*elem, exp)
                })
                .collect();
            Character { modulus: m, exponents }
        })
        .collect()
}
