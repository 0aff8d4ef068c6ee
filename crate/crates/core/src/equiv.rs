//! Cyclotomic equivalence of exponents, `d ~ p^j e^(+-1) (mod q - 1)`, and
//! the correspondence between exponents `(3^n+1)/(3^j+1)` and solutions of
//! `(3^m + 1) d - 2 = k (3^n - 1)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::numth::{is_prime, mod_inverse, resolve_exponent, FractionalExponent, NumthError};

/// Largest `n` for which `3^n - 1` is handled in 64-bit arithmetic.
const MAX_DEGREE: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("exponent {d} is 0 modulo {modulus}")]
    ZeroExponent { d: u64, modulus: u64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("not a Zha-Wang instance: {name} fails ({detail})")]
    Hypothesis { name: &'static str, detail: String },
    #[error(transparent)]
    Numth(#[from] NumthError),
}

fn modulus(p: u64, n: u32) -> Result<u64, EquivError> {
    if !is_prime(p) {
        return Err(EquivError::Parameter(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(EquivError::Parameter("degree must be positive".into()));
    }
    p.checked_pow(n)
        .map(|q| q - 1)
        .filter(|&m| m > 1)
        .ok_or_else(|| EquivError::Parameter(format!("{p}^{n} - 1 is out of range")))
}

/// An equivalence class of exponents modulo `q - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentClass {
    pub modulus: u64,
    pub representative: u64,
    /// Sorted residues in `[1, modulus - 1]`.
    pub members: Vec<u64>,
}

impl ExponentClass {
    pub fn contains(&self, d: u64) -> bool {
        self.members.binary_search(&(d % self.modulus)).is_ok()
    }
}

/// The orbit of `d` under multiplication by `p`, together with the orbit of
/// `d^{-1}` when `d` is invertible modulo `q - 1`.
pub fn equivalence_class(d: u64, p: u64, n: u32) -> Result<ExponentClass, EquivError> {
    let m = modulus(p, n)?;
    let r = d % m;
    if r == 0 {
        return Err(EquivError::ZeroExponent { d, modulus: m });
    }
    let orbit = |start: u64| {
        (0..n).scan(start, move |cur, _| {
            let v = *cur;
            *cur = (*cur as u128 * p as u128 % m as u128) as u64;
            Some(v)
        })
    };
    let mut members: Vec<u64> = orbit(r).collect();
    if let Some(inv) = mod_inverse(r, m) {
        members.extend(orbit(inv));
    }
    members.sort_unstable();
    members.dedup();
    Ok(ExponentClass {
        modulus: m,
        representative: members[0],
        members,
    })
}

pub fn are_equivalent(d: u64, e: u64, p: u64, n: u32) -> Result<bool, EquivError> {
    let m = modulus(p, n)?;
    if e.is_multiple_of(m) {
        return Err(EquivError::ZeroExponent { d: e, modulus: m });
    }
    Ok(equivalence_class(d, p, n)?.contains(e))
}

/// The partition of `[1, q - 2]` into classes, ordered by representative.
pub fn all_classes(p: u64, n: u32) -> Result<Vec<ExponentClass>, EquivError> {
    let m = modulus(p, n)?;
    let mut seen = vec![false; m as usize];
    let mut out = Vec::new();
    for d in 1..m {
        if seen[d as usize] {
            continue;
        }
        let class = equivalence_class(d, p, n)?;
        for &e in &class.members {
            seen[e as usize] = true;
        }
        out.push(class);
    }
    Ok(out)
}

/// A solution of `(3^m + 1) d - 2 = k (3^n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZhaWangParams {
    pub n: u32,
    pub m: u32,
    pub d: u64,
    pub k: u64,
}

impl ZhaWangParams {
    /// Exact check of the defining equation.
    pub fn equation_holds(&self) -> bool {
        let three = BigInt::from(3);
        let lhs = (three.pow(self.m) + 1) * BigInt::from(self.d) - 2;
        let rhs = BigInt::from(self.k) * (three.pow(self.n) - 1);
        lhs == rhs
    }

    pub fn record(&self) -> ZhaWangRecord {
        ZhaWangRecord {
            n: self.n,
            m: self.m,
            d: self.d,
            k: self.k,
            equation_check: self.equation_holds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZhaWangRecord {
    pub n: u32,
    pub m: u32,
    pub d: u64,
    pub k: u64,
    pub equation_check: bool,
}

fn hypothesis(name: &'static str, detail: String) -> EquivError {
    EquivError::Hypothesis { name, detail }
}

/// Returns `k = ((3^m + 1) d - 2)/(3^n - 1)` after checking each condition in
/// turn; the first one to fail is named in the error.
pub fn zha_wang_witness(n: u32, m: u32, d: u64) -> Result<u64, EquivError> {
    if n == 0 || n > MAX_DEGREE {
        return Err(EquivError::Parameter(format!("n = {n} is out of range")));
    }
    if d == 0 || d % 2 == 1 {
        return Err(hypothesis("d even and positive", format!("d = {d}")));
    }
    if m == 0 {
        return Err(hypothesis("m positive", "m = 0".into()));
    }
    if m.gcd(&n) != 1 {
        return Err(hypothesis("gcd(m, n) = 1", format!("gcd({m}, {n}) = {}", m.gcd(&n))));
    }
    if 2 * m >= n {
        return Err(hypothesis("2m < n", format!("m = {m}, n = {n}")));
    }
    let three = BigInt::from(3u32);
    let num: BigInt = (three.pow(m) + 1u32) * BigInt::from(d) - 2u32;
    let den: BigInt = three.pow(n) - 1u32;
    let (k, r): (BigInt, BigInt) = num.div_rem(&den);
    if r != BigInt::from(0) {
        return Err(hypothesis(
            "integral witness",
            format!("(3^{m} + 1) * {d} - 2 is not divisible by 3^{n} - 1"),
        ));
    }
    if k.is_even() {
        return Err(hypothesis("odd witness", format!("k = {k}")));
    }
    u64::try_from(k).map_err(|_| EquivError::Parameter("witness out of range".into()))
}

impl TryFrom<(u32, u32, u64)> for ZhaWangParams {
    type Error = EquivError;

    fn try_from((n, m, d): (u32, u32, u64)) -> Result<Self, Self::Error> {
        let k = zha_wang_witness(n, m, d)?;
        Ok(ZhaWangParams { n, m, d, k })
    }
}

/// An exponent `(3^n + 1)/(3^j + 1)` resolved modulo `3^n - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FractionForm {
    pub n: u32,
    pub j: u32,
    pub fraction: String,
    pub resolved: u64,
}

fn fraction_exponent(n: u32, j: u32) -> Result<FractionForm, EquivError> {
    let half = |e: u32| (BigUint::from(3u32).pow(e) + 1u32) / 2u32;
    let m = 3u64.pow(n) - 1;
    let resolved = resolve_exponent(&FractionalExponent::new(half(n), half(j))?, m)?.value;
    Ok(FractionForm {
        n,
        j,
        fraction: format!("(3^{n}+1)/(3^{j}+1)"),
        resolved,
    })
}

/// Takes `j = m` for even `m` and `j = n - m` otherwise.
pub fn zha_wang_to_fraction(zw: &ZhaWangParams) -> Result<FractionForm, EquivError> {
    let k = zha_wang_witness(zw.n, zw.m, zw.d)?;
    if k != zw.k {
        return Err(hypothesis("witness matches", format!("expected k = {k}, got {}", zw.k)));
    }
    let j = if zw.m.is_multiple_of(2) { zw.m } else { zw.n - zw.m };
    let form = fraction_exponent(zw.n, j)?;
    if !are_equivalent(zw.d, form.resolved, 3, zw.n)? {
        return Err(EquivError::Parameter(format!(
            "{} is not equivalent to {}",
            zw.d, form.resolved
        )));
    }
    Ok(form)
}

/// Builds the equation form of `(3^n + 1)/(3^j + 1)`: with `m' = j mod n`,
/// keep `d` when `2m' < n`, otherwise use `m = n - m'` and `d' = 3^m' d`.
pub fn fraction_to_zha_wang(n: u32, j: u32) -> Result<ZhaWangParams, EquivError> {
    if n == 0 || n > MAX_DEGREE || n.is_multiple_of(2) {
        return Err(EquivError::Parameter(format!("n must be odd and at most {MAX_DEGREE}, got {n}")));
    }
    if j == 0 || j % 2 == 1 {
        return Err(EquivError::Parameter(format!("j must be even and positive, got {j}")));
    }
    if j.gcd(&n) != 1 {
        return Err(EquivError::Parameter(format!("gcd(j, n) must be 1, got gcd({j}, {n})")));
    }
    let modulus = 3u64.pow(n) - 1;
    let d = fraction_exponent(n, j)?.resolved;
    let mp = j % n;
    let (m, dp) = if 2 * mp < n {
        (mp, d)
    } else {
        let scaled = (3u128.pow(mp) * d as u128 % modulus as u128) as u64;
        (n - mp, scaled)
    };
    ZhaWangParams::try_from((n, m, dp))
}
