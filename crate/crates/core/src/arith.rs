//! Small u64 number theory used across the crate.

/// Prime factorization by trial division, as (prime, multiplicity) pairs
/// in increasing order. `n >= 1`.
pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    factor_u64(n) == vec![(n, 1)]
}

pub(crate) fn euler_phi_u64(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .map(|(p, k)| p.pow(k - 1) * (p - 1))
        .product()
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}
