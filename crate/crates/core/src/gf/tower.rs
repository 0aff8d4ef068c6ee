use std::sync::Arc;

use super::{Field, FieldElement, FieldError};
use crate::numth::prime_divisors;

/// An element `a + b*y` of the quadratic extension `E = F[y]/(y^2 - s)`.
///
/// Ordering is lexicographic on `(a, b)`, i.e. on the concatenated coefficient
/// sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElement {
    pub a: FieldElement,
    pub b: FieldElement,
}

/// The quadratic extension `E` of `F`, kept as pairs over `F` so that the
/// embedding, conjugation and unit-circle membership are structural.
#[derive(Debug, Clone)]
pub struct TowerField {
    base: Arc<Field>,
    nonresidue: FieldElement,
    primitive: ExtElement,
}

impl TowerField {
    /// Builds `E = F[y]/(y^2 - s)` with `s` the smallest nonresidue of `F`.
    pub fn new(base: Arc<Field>) -> TowerField {
        let nonresidue = base
            .units()
            .find(|&x| base.quadratic_character(x) == -1)
            .expect("odd-order fields have nonresidues");
        let one = ExtElement {
            a: base.one(),
            b: base.zero(),
        };
        let mut tower = TowerField {
            base,
            nonresidue,
            primitive: one,
        };
        tower.primitive = tower.find_primitive();
        tower
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<Field> {
        &self.base
    }

    /// The nonresidue `s` with `y^2 = s`.
    pub fn nonresidue(&self) -> FieldElement {
        self.nonresidue
    }

    /// `|E| = q^2`.
    pub fn order(&self) -> u64 {
        let q = self.base.order() as u64;
        q * q
    }

    pub fn unit_order(&self) -> u64 {
        self.order() - 1
    }

    pub fn embed(&self, a: FieldElement) -> ExtElement {
        ExtElement {
            a,
            b: self.base.zero(),
        }
    }

    pub fn new_element(&self, a: FieldElement, b: FieldElement) -> ExtElement {
        ExtElement { a, b }
    }

    /// The `F` component of `x` when `x` lies in the embedded copy of `F`.
    pub fn to_base(&self, x: ExtElement) -> Option<FieldElement> {
        x.b.is_zero().then_some(x.a)
    }

    pub fn zero(&self) -> ExtElement {
        self.embed(self.base.zero())
    }

    pub fn one(&self) -> ExtElement {
        self.embed(self.base.one())
    }

    /// The adjoined square root `y` of the nonresidue.
    pub fn generator(&self) -> ExtElement {
        ExtElement {
            a: self.base.zero(),
            b: self.base.one(),
        }
    }

    pub fn is_zero(&self, x: ExtElement) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }

    pub fn add(&self, x: ExtElement, z: ExtElement) -> ExtElement {
        let f = &*self.base;
        ExtElement {
            a: f.add(x.a, z.a),
            b: f.add(x.b, z.b),
        }
    }

    pub fn sub(&self, x: ExtElement, z: ExtElement) -> ExtElement {
        let f = &*self.base;
        ExtElement {
            a: f.sub(x.a, z.a),
            b: f.sub(x.b, z.b),
        }
    }

    pub fn neg(&self, x: ExtElement) -> ExtElement {
        let f = &*self.base;
        ExtElement {
            a: f.neg(x.a),
            b: f.neg(x.b),
        }
    }

    pub fn mul(&self, x: ExtElement, z: ExtElement) -> ExtElement {
        let f = &*self.base;
        let ac = f.mul(x.a, z.a);
        let bd = f.mul(x.b, z.b);
        let ad = f.mul(x.a, z.b);
        let bc = f.mul(x.b, z.a);
        ExtElement {
            a: f.add(ac, f.mul(bd, self.nonresidue)),
            b: f.add(ad, bc),
        }
    }

    pub fn scale(&self, c: FieldElement, x: ExtElement) -> ExtElement {
        let f = &*self.base;
        ExtElement {
            a: f.mul(c, x.a),
            b: f.mul(c, x.b),
        }
    }

    /// `(a + b y) -> (a - b y)`.
    pub fn conj(&self, x: ExtElement) -> ExtElement {
        ExtElement {
            a: x.a,
            b: self.base.neg(x.b),
        }
    }

    /// `x * conj(x) = a^2 - s b^2`, an element of `F`.
    pub fn norm(&self, x: ExtElement) -> FieldElement {
        let f = &*self.base;
        f.sub(f.square(x.a), f.mul(self.nonresidue, f.square(x.b)))
    }

    pub fn inv(&self, x: ExtElement) -> Result<ExtElement, FieldError> {
        let n = self.base.inv(self.norm(x))?;
        Ok(self.scale(n, self.conj(x)))
    }

    pub fn div(&self, x: ExtElement, z: ExtElement) -> Result<ExtElement, FieldError> {
        Ok(self.mul(x, self.inv(z)?))
    }

    /// Square-and-multiply; exponents are reduced mod `q^2 - 1` for nonzero `x`.
    pub fn pow(&self, x: ExtElement, e: u64) -> ExtElement {
        if e == 0 {
            return self.one();
        }
        if self.is_zero(x) {
            return x;
        }
        let mut e = e % self.unit_order();
        if e == 0 {
            return self.one();
        }
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `x^(p^j)` computed as a plain power in `E`.
    pub fn frobenius(&self, x: ExtElement, j: u64) -> ExtElement {
        let p = self.base.characteristic() as u64;
        let e = crate::numth::pow_mod(p, j, self.unit_order());
        self.pow(x, if e == 0 { self.unit_order() } else { e })
    }

    /// All `q^2` elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = ExtElement> + '_ {
        self.base
            .elements()
            .flat_map(move |a| self.base.elements().map(move |b| ExtElement { a, b }))
    }

    pub fn units(&self) -> impl Iterator<Item = ExtElement> + '_ {
        self.elements().filter(move |&x| !self.is_zero(x))
    }

    fn find_primitive(&self) -> ExtElement {
        let order = self.unit_order();
        let checks: Vec<u64> = prime_divisors(order).into_iter().map(|l| order / l).collect();
        let one = self.one();
        self.units()
            .find(|&x| checks.iter().all(|&e| self.pow(x, e) != one))
            .expect("every finite field has a primitive element")
    }

    /// The smallest element of multiplicative order `q^2 - 1` in `E`.
    pub fn primitive_element(&self) -> ExtElement {
        self.primitive
    }

    /// Unit-circle membership: `x * conj(x) = 1`.
    pub fn is_on_unit_circle(&self, x: ExtElement) -> bool {
        self.norm(x) == self.base.one()
    }

    /// The `q + 1` elements of `U_E`, as powers of `beta^(q-1)`, in canonical order.
    pub fn unit_circle_elements(&self) -> Vec<ExtElement> {
        let q = self.base.order() as u64;
        let gen = self.pow(self.primitive, q - 1);
        let mut out = Vec::with_capacity(q as usize + 1);
        let mut cur = self.one();
        for _ in 0..=q {
            out.push(cur);
            cur = self.mul(cur, gen);
        }
        out.sort();
        out
    }

    /// A square root in `E` of an element of `F`; it always exists.
    pub fn sqrt_of_base(&self, c: FieldElement) -> ExtElement {
        let f = &*self.base;
        match f.sqrt(c) {
            Some(r) => self.embed(r),
            None => {
                // c / s is a square, and (r y)^2 = r^2 s = c
                let r = f
                    .sqrt(f.div(c, self.nonresidue).expect("nonresidue is nonzero"))
                    .expect("quotient of two nonresidues is a square");
                ExtElement {
                    a: f.zero(),
                    b: r,
                }
            }
        }
    }

    pub fn format(&self, x: ExtElement) -> String {
        let f = &*self.base;
        match (x.a.is_zero(), x.b.is_zero()) {
            (_, true) => f.format(x.a),
            (true, false) => format!("({})y", f.format(x.b)),
            (false, false) => format!("{}+({})y", f.format(x.a), f.format(x.b)),
        }
    }
}
