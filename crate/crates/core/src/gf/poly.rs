//! Dense polynomials over GF(p), coefficients constant-first.
//!
//! This is the slow reference arithmetic. Field tables are built from it and the
//! table-driven operations are checked against it.

use crate::numth::prime_divisors;

pub(crate) type Poly = Vec<u32>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    crate::numth::mod_inverse(a as u64, p as u64).expect("nonzero residue mod prime") as u32
}

pub(crate) fn add(a: &[u32], b: &[u32], p: u32) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p64 = p as u64;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let mut r = trim(a.to_vec());
    let dm = degree(m).expect("division by the zero polynomial");
    let lead_inv = inv_mod_p(m[dm], p) as u64;
    let p64 = p as u64;
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let factor = r[dr] as u64 * lead_inv % p64;
        let shift = dr - dm;
        for (i, &c) in m.iter().enumerate() {
            let idx = i + shift;
            r[idx] = ((r[idx] as u64 + p64 - factor * c as u64 % p64) % p64) as u32;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Poly {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Poly {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let inv = inv_mod_p(a[d], p) as u64;
        for c in a.iter_mut() {
            *c = (*c as u64 * inv % p as u64) as u32;
        }
    }
    a
}

/// `x^(p^k) mod f` by `k` successive p-th powers.
fn frobenius_x(f: &[u32], k: u32, p: u32) -> Poly {
    let mut acc = rem(&[0, 1], f, p);
    for _ in 0..k {
        acc = pow_mod(&acc, p as u64, f, p);
    }
    acc
}

/// Rabin's test: a monic `f` of degree `n` is irreducible over GF(p) iff
/// `x^(p^n) = x (mod f)` and `gcd(x^(p^(n/l)) - x, f) = 1` for each prime `l | n`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let Some(n) = degree(f) else {
        return false;
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = [0u32, 1];
    let x_mod = rem(&x, f, p);
    if frobenius_x(f, n as u32, p) != x_mod {
        return false;
    }
    prime_divisors(n as u64).into_iter().all(|l| {
        let h = frobenius_x(f, (n as u64 / l) as u32, p);
        let g = gcd(&sub(&h, &x_mod, p), f, p);
        degree(&g) == Some(0)
    })
}

/// The monic degree-`n` polynomial whose constant-first coefficient sequence is
/// the `rank`-th in lexicographic order.
pub(crate) fn monic_from_rank(mut rank: u64, n: usize, p: u32) -> Poly {
    let mut coeffs = vec![0u32; n + 1];
    coeffs[n] = 1;
    for i in (0..n).rev() {
        coeffs[i] = (rank % p as u64) as u32;
        rank /= p as u64;
    }
    coeffs
}

/// Lexicographically smallest monic irreducible of degree `n` over GF(p).
pub(crate) fn smallest_irreducible(n: usize, p: u32) -> Poly {
    let total = (p as u64).pow(n as u32);
    (0..total)
        .map(|r| monic_from_rank(r, n, p))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: reducible iff some monic factor of degree 1..=n/2 divides f.
    fn brute_irreducible(f: &[u32], p: u32) -> bool {
        let n = degree(f).unwrap();
        for d in 1..=n / 2 {
            let count = (p as u64).pow(d as u32);
            for r in 0..count {
                let g = monic_from_rank(r, d, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_agrees_with_factor_search() {
        for (p, n) in [(3u32, 2usize), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (3, 5)] {
            let total = (p as u64).pow(n as u32);
            for r in 0..total {
                let f = monic_from_rank(r, n, p);
                assert_eq!(is_irreducible(&f, p), brute_irreducible(&f, p), "p={p} f={f:?}");
            }
        }
    }

    #[test]
    fn smallest_cubic_over_gf3() {
        // Enumerate monic cubics constant-first and keep the first without a root.
        let expected = (0..27u64)
            .map(|r| monic_from_rank(r, 3, 3))
            .find(|f| (0..3u64).all(|x| !(f[0] as u64 + f[1] as u64 * x + f[2] as u64 * x * x + x * x * x).is_multiple_of(3)))
            .unwrap();
        assert_eq!(smallest_irreducible(3, 3), expected);
        assert_eq!(expected, vec![1, 0, 2, 1]);
    }

    #[test]
    fn x3_minus_x_plus_2_is_irreducible() {
        // x^3 - x + 2 = x^3 + 2x + 2 over GF(3); it has no roots.
        let f = vec![2, 2, 0, 1];
        assert!(brute_irreducible(&f, 3));
        assert!(is_irreducible(&f, 3));
        // x^3 + 1 = (x + 1)^3
        assert!(!is_irreducible(&[1, 0, 0, 1], 3));
    }

    #[test]
    fn gcd_is_monic() {
        let a = mul(&[1, 1], &[2, 0, 1], 3);
        let b = mul(&[1, 1], &[0, 1], 3);
        assert_eq!(gcd(&a, &b, 3), vec![1, 1]);
    }
}
