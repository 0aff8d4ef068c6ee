//! Exact integer number theory: valuations, the power-gcd identities, modular
//! inverses and the convention for fractional exponents.
//!
//! Everything here is arbitrary precision at the interface. Where a fixed-width
//! shortcut is taken internally it produces the same value as the big-integer
//! route (the tests compare the two).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumthError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(
        "exponent {numerator}/{denominator} is not interpretable over a group of order {modulus} \
         (gcd({denominator}, {modulus}) = {gcd})"
    )]
    NotInterpretable {
        numerator: BigUint,
        denominator: BigUint,
        modulus: u64,
        gcd: u64,
    },
    #[error("cannot parse exponent {0:?}; expected an integer or a/b")]
    Parse(String),
}

/// A p-adic valuation. `Infinite` is the valuation of zero and compares
/// greater than every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl From<u32> for Valuation {
    fn from(k: u32) -> Self {
        Valuation::Finite(k)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Primality by trial division. Only desk-scale inputs reach this.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Inverse of `a` modulo `m`, if it exists. `m = 1` yields `Some(0)`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 && m != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `base^exp mod m` with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

fn require_prime(p: u64) -> Result<(), NumthError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(NumthError::NotPrime(p))
    }
}

/// The p-adic valuation of `n`.
pub fn vp(n: impl Into<BigInt>, p: u64) -> Result<Valuation, NumthError> {
    require_prime(p)?;
    let n: BigInt = n.into();
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let mut m = n.abs().into_parts().1;
    if p == 2 {
        // trailing_zeros is Some for nonzero input
        return Ok(Valuation::Finite(m.trailing_zeros().unwrap_or(0) as u32));
    }
    if let Some(mut small) = m.to_u128() {
        let p = p as u128;
        let mut k = 0;
        while small % p == 0 {
            small /= p;
            k += 1;
        }
        return Ok(Valuation::Finite(k));
    }
    let p = BigUint::from(p);
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        m = q;
        k += 1;
    }
    Ok(Valuation::Finite(k))
}

fn v2_i128(x: i128) -> Valuation {
    if x == 0 {
        Valuation::Infinite
    } else {
        Valuation::Finite(x.trailing_zeros())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `v_2(a^j + 1)` or `v_2(a^j - 1)` for odd `a`, by case analysis on `a mod 4`
/// and the parity of `j`. The power `a^j` is never formed.
pub fn v2_closed_form(a: i64, j: u64, sign: Sign) -> Result<Valuation, NumthError> {
    if a % 2 == 0 {
        return Err(NumthError::Parameter(format!(
            "v2 closed form needs an odd base, got {a}"
        )));
    }
    let a = a as i128;
    let v2_j = v2_i128(j as i128);
    let j_even = j.is_multiple_of(2);
    let v = if a.rem_euclid(4) == 1 {
        match sign {
            Sign::Plus => Valuation::Finite(1),
            Sign::Minus => v2_i128(a - 1) + v2_j,
        }
    } else {
        match (sign, j_even) {
            (Sign::Plus, true) => Valuation::Finite(1),
            (Sign::Plus, false) => v2_i128(a + 1),
            (Sign::Minus, true) => v2_i128(a + 1) + v2_j,
            (Sign::Minus, false) => Valuation::Finite(1),
        }
    };
    Ok(v)
}

/// `gcd(a^m - 1, a^n - 1) = a^gcd(m,n) - 1`.
pub fn gcd_power_minus(a: u64, m: u64, n: u64) -> Result<BigUint, NumthError> {
    if a < 2 {
        return Err(NumthError::Parameter(format!("base must be at least 2, got {a}")));
    }
    let g = m.gcd(&n);
    let g = u32::try_from(g)
        .map_err(|_| NumthError::Parameter(format!("exponent {g} too large")))?;
    Ok(BigUint::from(a).pow(g) - 1u32)
}

/// `gcd(a^m + 1, a^n - 1)` (or with `(a^m + 1)/2` when `halved`) for odd `n`
/// coprime to `m`. The answer is always 1 or 2.
pub fn gcd_power_plus_minus(a: u64, m: u64, n: u64, halved: bool) -> Result<u64, NumthError> {
    if a < 2 {
        return Err(NumthError::Parameter(format!("base must be at least 2, got {a}")));
    }
    if n.is_multiple_of(2) {
        return Err(NumthError::Parameter(format!("n must be odd, got {n}")));
    }
    if m.gcd(&n) != 1 {
        return Err(NumthError::Parameter(format!(
            "m and n must be coprime, gcd({m}, {n}) = {}",
            m.gcd(&n)
        )));
    }
    let a_even = a.is_multiple_of(2);
    if !halved {
        return Ok(if a_even { 1 } else { 2 });
    }
    if a_even {
        return Err(NumthError::Parameter(format!(
            "halved form needs an odd base, got {a}"
        )));
    }
    if a % 4 == 1 || m.is_multiple_of(2) {
        Ok(1)
    } else {
        Ok(2)
    }
}

/// A rational exponent `numerator/denominator` before it is tied to a field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FractionalExponent {
    numerator: BigUint,
    denominator: BigUint,
}

impl FractionalExponent {
    pub fn new(
        numerator: impl Into<BigUint>,
        denominator: impl Into<BigUint>,
    ) -> Result<Self, NumthError> {
        let numerator = numerator.into();
        let denominator = denominator.into();
        if numerator.is_zero() || denominator.is_zero() {
            return Err(NumthError::Parameter(format!(
                "fractional exponent {numerator}/{denominator} needs positive parts"
            )));
        }
        Ok(FractionalExponent {
            numerator,
            denominator,
        })
    }

    pub fn integer(d: impl Into<BigUint>) -> Result<Self, NumthError> {
        Self::new(d, 1u32)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// Lowest-terms form `(d1, d2)`.
    pub fn reduced(&self) -> (BigUint, BigUint) {
        let g = self.numerator.gcd(&self.denominator);
        (&self.numerator / &g, &self.denominator / &g)
    }
}

impl fmt::Display for FractionalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

impl FromStr for FractionalExponent {
    type Err = NumthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| -> Result<BigUint, NumthError> {
            t.trim()
                .parse::<BigUint>()
                .map_err(|_| NumthError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((num, den)) => Self::new(parse(num)?, parse(den)?),
            None => Self::integer(parse(s)?),
        }
    }
}

/// A fractional exponent pinned to a multiplicative group of order `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResolvedExponent {
    /// Reduced numerator `d1`.
    pub numerator: BigUint,
    /// Reduced denominator `d2`.
    pub denominator: BigUint,
    pub modulus: u64,
    /// The exponent `d` in `[1, modulus]` with `d * d2 = d1 (mod modulus)`.
    pub value: u64,
}

/// Interprets `fe` as an integer exponent modulo `modulus` (normally `q - 1`).
pub fn resolve_exponent(
    fe: &FractionalExponent,
    modulus: u64,
) -> Result<ResolvedExponent, NumthError> {
    if modulus == 0 {
        return Err(NumthError::Parameter("modulus must be positive".into()));
    }
    let (d1, d2) = fe.reduced();
    let m = BigUint::from(modulus);
    let d1_mod = (&d1 % &m).to_u64().unwrap_or(0);
    let d2_mod = (&d2 % &m).to_u64().unwrap_or(0);
    let g = d2_mod.gcd(&modulus);
    if g != 1 {
        return Err(NumthError::NotInterpretable {
            numerator: d1,
            denominator: d2,
            modulus,
            gcd: g,
        });
    }
    let inv = mod_inverse(d2_mod, modulus).expect("coprime residues are invertible");
    let mut value = ((d1_mod as u128 * inv as u128) % modulus as u128) as u64;
    if value == 0 {
        value = modulus;
    }
    Ok(ResolvedExponent {
        numerator: d1,
        denominator: d2,
        modulus,
        value,
    })
}

/// `(p^j - 1)/2 mod (p - 1)`, evaluated as `j(p - 1)/2 mod (p - 1)`.
pub fn half_power_congruence(p: u64, j: u64) -> Result<u64, NumthError> {
    require_prime(p)?;
    if p == 2 {
        return Err(NumthError::Parameter("p must be odd".into()));
    }
    let half = (p - 1) / 2;
    Ok(((j as u128 * half as u128) % (p - 1) as u128) as u64)
}
