use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};

use num_integer::Integer;

use super::{poly, FieldError};
use crate::numth::{is_prime, pow_mod, prime_divisors};

/// Largest field order a [`Field`] will tabulate.
pub const MAX_FIELD_ORDER: u64 = 1 << 23;

const NO_LOG: u32 = u32::MAX;

static NEXT_FIELD_ID: AtomicU32 = AtomicU32::new(1);

/// An element of a specific [`Field`].
///
/// Elements are stored packed: the coefficient sequence `c0, c1, ..., c(n-1)`
/// (coefficient of `x^i` at position `i`) is read as base-`p` digits with `c0`
/// most significant. Integer order on the packed value is therefore the
/// lexicographic order on coefficient sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    owner: u32,
    index: u32,
}

impl FieldElement {
    /// Position of the element in the canonical order, in `[0, q)`.
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }
}

/// A concrete finite field GF(p^n), p odd, with its defining polynomial.
///
/// Construction tabulates discrete logarithms with respect to the canonical
/// primitive element, so every arithmetic operation afterwards is a table
/// lookup. The slow coefficient-sequence arithmetic stays available through
/// the `reference_*` methods.
#[derive(Debug, Clone)]
pub struct Field {
    id: u32,
    p: u32,
    n: u32,
    q: u32,
    poly: Vec<u32>,
    weights: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    primitive: u32,
}

impl Field {
    /// GF(p^n) defined by `poly` (monic, constant-first, length `n + 1`), or by
    /// the lexicographically smallest monic irreducible when `poly` is `None`.
    pub fn new(p: u32, n: u32, poly: Option<Vec<u32>>) -> Result<Field, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(n)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(FieldError::TooLarge { p, n })?;
        let q = q as u32;
        let poly = match poly {
            Some(f) => {
                validate_poly(&f, p, n)?;
                if !poly::is_irreducible(&f, p) {
                    return Err(FieldError::Reducible(describe(p, n, &f)));
                }
                f
            }
            None => poly::smallest_irreducible(n as usize, p),
        };
        let weights = (0..n).map(|i| p.pow(n - 1 - i)).collect();
        let mut field = Field {
            id: NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed),
            p,
            n,
            q,
            poly,
            weights,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
            primitive: 0,
        };
        field.primitive = field.find_primitive();
        field.build_tables();
        Ok(field)
    }

    /// The field with `n = 1`.
    pub fn prime(p: u32) -> Result<Field, FieldError> {
        Field::new(p, 1, None)
    }

    fn find_primitive(&self) -> u32 {
        let order = self.q as u64 - 1;
        let checks: Vec<u64> = prime_divisors(order).into_iter().map(|l| order / l).collect();
        let one = self.reference_one();
        (1..self.q)
            .find(|&idx| {
                let x = self.digits(idx);
                checks.iter().all(|&e| self.reference_pow_digits(&x, e) != one)
            })
            .expect("every finite field has a primitive element")
    }

    fn build_tables(&mut self) {
        let order = (self.q - 1) as usize;
        let alpha = self.digits(self.primitive);
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![NO_LOG; self.q as usize];
        let mut cur = self.reference_one();
        for k in 0..order {
            let idx = self.pack(&cur);
            exp.push(idx);
            log[idx as usize] = k as u32;
            cur = poly::mul_mod(&cur, &alpha, &self.poly, self.p);
        }
        let one = self.reference_one();
        let zech = exp
            .iter()
            .map(|&e| {
                let s = poly::add(&one, &self.digits(e), self.p);
                if s.is_empty() {
                    NO_LOG
                } else {
                    log[self.pack(&s) as usize]
                }
            })
            .collect();
        self.exp = exp;
        self.log = log;
        self.zech = zech;
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// `q - 1`, the order of the multiplicative group.
    pub fn unit_order(&self) -> u64 {
        self.q as u64 - 1
    }

    /// Defining polynomial, constant-first and monic.
    pub fn defining_poly(&self) -> &[u32] {
        &self.poly
    }

    /// `p^n:c0,c1,...,cn`.
    pub fn description(&self) -> String {
        describe(self.p, self.n, &self.poly)
    }

    pub fn same_field(&self, other: &Field) -> bool {
        self.id == other.id
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        x.owner == self.id
    }

    fn elem(&self, index: u32) -> FieldElement {
        FieldElement {
            owner: self.id,
            index,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(self.weights[0])
    }

    /// The image of the integer `k` in the prime field.
    pub fn from_int(&self, k: i64) -> FieldElement {
        let c = k.rem_euclid(self.p as i64) as u32;
        self.elem(c * self.weights[0])
    }

    /// Element at position `index` of the canonical order.
    pub fn from_index(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index < self.q {
            Ok(self.elem(index))
        } else {
            Err(FieldError::Parse(format!("index {index} out of range for order {}", self.q)))
        }
    }

    /// Element with coefficients `coeffs` (constant-first); missing trailing
    /// coefficients are zero, entries are reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.n as usize {
            return Err(FieldError::Parse(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                self.n
            )));
        }
        let reduced: Vec<u32> = coeffs.iter().map(|c| c % self.p).collect();
        Ok(self.elem(self.pack(&reduced)))
    }

    /// Coefficient sequence of length `n`, constant-first.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        self.digits(x.index)
    }

    fn digits(&self, mut index: u32) -> Vec<u32> {
        let mut out = vec![0; self.n as usize];
        for i in (0..self.n as usize).rev() {
            out[i] = index % self.p;
            index /= self.p;
        }
        out
    }

    fn pack(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().zip(&self.weights).map(|(c, w)| c * w).sum()
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |i| self.elem(i))
    }

    /// The nonzero elements in canonical order.
    pub fn units(&self) -> impl ExactSizeIterator<Item = FieldElement> + '_ {
        (1..self.q).map(move |i| self.elem(i))
    }

    /// Whether `x` lies in the prime subfield GF(p).
    pub fn in_prime_field(&self, x: FieldElement) -> bool {
        x.index.is_multiple_of(self.weights[0])
    }

    /// Discrete log to the canonical primitive element; `None` for zero.
    pub fn log(&self, x: FieldElement) -> Option<u64> {
        match self.log[x.index as usize] {
            NO_LOG => None,
            l => Some(l as u64),
        }
    }

    /// `alpha^k` for the canonical primitive element `alpha`.
    pub fn exp(&self, k: u64) -> FieldElement {
        self.elem(self.exp[(k % self.unit_order()) as usize])
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.index == 0 {
            return b;
        }
        if b.index == 0 {
            return a;
        }
        let order = self.q - 1;
        let la = self.log[a.index as usize];
        let lb = self.log[b.index as usize];
        let t = if lb >= la { lb - la } else { lb + order - la };
        match self.zech[t as usize] {
            NO_LOG => self.zero(),
            z => self.elem(self.exp[((la as u64 + z as u64) % order as u64) as usize]),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a));
        if a.index == 0 {
            return a;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.index as usize] as u64 + order / 2;
        self.elem(self.exp[(l % order) as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.index == 0 || b.index == 0 {
            return self.zero();
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.index as usize] as u64 + self.log[b.index as usize] as u64;
        self.elem(self.exp[(l % order) as usize])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        match self.log(a) {
            None => Err(FieldError::DivisionByZero),
            Some(l) => Ok(self.exp(self.unit_order() - l)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    #[inline]
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        debug_assert!(self.contains(a));
        if e == 0 {
            return self.one();
        }
        match self.log[a.index as usize] {
            NO_LOG => self.zero(),
            l => {
                let order = self.unit_order() as u128;
                let k = (l as u128 * e as u128 % order) as usize;
                self.elem(self.exp[k])
            }
        }
    }

    /// `a^e` for signed `e`; negative exponents invert first.
    pub fn pow_signed(&self, a: FieldElement, e: i64) -> Result<FieldElement, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// `x^(p^j)`.
    pub fn frobenius(&self, x: FieldElement, j: u64) -> FieldElement {
        let e = pow_mod(self.p as u64, j, self.unit_order());
        // keep 0 -> 0 if the reduced exponent ever vanishes
        self.pow(x, if e == 0 { self.unit_order() } else { e })
    }

    fn check(&self, a: FieldElement) -> Result<(), FieldError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(FieldError::OwnerMismatch)
        }
    }

    pub fn try_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn try_sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sub(a, b))
    }

    pub fn try_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Extended quadratic character: 0 at zero, 1 on squares, -1 otherwise.
    pub fn quadratic_character(&self, x: FieldElement) -> i8 {
        match self.log[x.index as usize] {
            NO_LOG => 0,
            l if l % 2 == 0 => 1,
            _ => -1,
        }
    }

    pub fn is_square(&self, x: FieldElement) -> bool {
        self.quadratic_character(x) >= 0
    }

    /// A square root of `x`, if one exists in the field.
    pub fn sqrt(&self, x: FieldElement) -> Option<FieldElement> {
        match self.log[x.index as usize] {
            NO_LOG => Some(self.zero()),
            l if l % 2 == 0 => Some(self.exp(l as u64 / 2)),
            _ => None,
        }
    }

    /// The lexicographically smallest element of multiplicative order `q - 1`.
    pub fn primitive_element(&self) -> FieldElement {
        self.elem(self.primitive)
    }

    pub fn multiplicative_order(&self, x: FieldElement) -> Option<u64> {
        let l = self.log(x)?;
        Some(self.unit_order() / l.gcd(&self.unit_order()))
    }

    /// `{x : x^d = c}` in canonical order, found by solving for discrete logs.
    pub fn power_map_fiber(&self, d: u64, c: FieldElement) -> Vec<FieldElement> {
        let Some(lc) = self.log(c) else {
            return vec![self.zero()];
        };
        let order = self.unit_order();
        let g = (d % order).gcd(&order);
        if lc % g != 0 {
            return Vec::new();
        }
        let step = order / g;
        let dr = (d % order) / g;
        let t0 = if step == 1 {
            0
        } else {
            let inv = crate::numth::mod_inverse(dr % step, step).expect("coprime after dividing by gcd");
            ((lc / g) as u128 * inv as u128 % step as u128) as u64
        };
        let mut out: Vec<_> = (0..g).map(|i| self.exp(t0 + i * step)).collect();
        out.sort();
        out
    }

    /// Renders `x` as a polynomial in `x` (or a bare residue for prime fields).
    pub fn format(&self, x: FieldElement) -> String {
        let coeffs = self.coeffs(x);
        if self.n == 1 {
            return coeffs[0].to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    fn reference_one(&self) -> Vec<u32> {
        poly::rem(&[1], &self.poly, self.p)
    }

    fn reference_pow_digits(&self, x: &[u32], e: u64) -> Vec<u32> {
        poly::pow_mod(x, e, &self.poly, self.p)
    }

    fn element_of_poly(&self, r: &[u32]) -> FieldElement {
        let mut digits = r.to_vec();
        digits.resize(self.n as usize, 0);
        self.elem(self.pack(&digits))
    }

    /// Coefficient-wise addition, without tables.
    pub fn reference_add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.element_of_poly(&poly::add(&self.coeffs(a), &self.coeffs(b), self.p))
    }

    /// Schoolbook product reduced by the defining polynomial, without tables.
    pub fn reference_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.element_of_poly(&poly::mul_mod(&self.coeffs(a), &self.coeffs(b), &self.poly, self.p))
    }

    /// Square-and-multiply on coefficient sequences, without tables.
    pub fn reference_pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.element_of_poly(&self.reference_pow_digits(&self.coeffs(a), e))
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description())
    }
}

fn validate_poly(f: &[u32], p: u32, n: u32) -> Result<(), FieldError> {
    if f.len() != n as usize + 1 {
        return Err(FieldError::BadPolynomial(format!(
            "expected {} coefficients for degree {n}, got {}",
            n + 1,
            f.len()
        )));
    }
    if f[n as usize] != 1 {
        return Err(FieldError::BadPolynomial("polynomial is not monic".into()));
    }
    if let Some(c) = f.iter().find(|&&c| c >= p) {
        return Err(FieldError::BadPolynomial(format!("coefficient {c} is not a residue mod {p}")));
    }
    Ok(())
}

fn describe(p: u32, n: u32, f: &[u32]) -> String {
    let coeffs: Vec<String> = f.iter().map(|c| c.to_string()).collect();
    format!("{p}^{n}:{}", coeffs.join(","))
}

/// Parsed form of the `p^n:c0,c1,...,cn` field description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDescription {
    pub p: u32,
    pub n: u32,
    pub poly: Vec<u32>,
}

impl FieldDescription {
    pub fn build(&self) -> Result<Field, FieldError> {
        Field::new(self.p, self.n, Some(self.poly.clone()))
    }
}

impl FromStr for FieldDescription {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(format!("expected p^n:c0,...,cn, got {s:?}"));
        let (pn, coeffs) = s.trim().split_once(':').ok_or_else(bad)?;
        let (p, n) = pn.split_once('^').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let poly = coeffs
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FieldDescription { p, n, poly })
    }
}

impl fmt::Display for FieldDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&describe(self.p, self.n, &self.poly))
    }
}
