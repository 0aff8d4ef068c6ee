//! Arithmetic in GF(p^n) for odd p and in its quadratic extension.
//!
//! [`Field`] holds a tabulated field: elements are small `Copy` handles and
//! every operation goes through the field object, e.g. `f.mul(a, b)`.
//! [`TowerField`] layers `E = F[y]/(y^2 - s)` on top of a field and gives
//! access to conjugation and the unit circle `U_E = {x : x * conj(x) = 1}`.

mod field;
mod poly;
mod tower;

use thiserror::Error;

pub use field::{Field, FieldDescription, FieldElement, MAX_FIELD_ORDER};
pub use tower::{ExtElement, TowerField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the supported maximum")]
    TooLarge { p: u32, n: u32 },
    #[error("bad defining polynomial: {0}")]
    BadPolynomial(String),
    #[error("defining polynomial {0} is reducible")]
    Reducible(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    OwnerMismatch,
    #[error("{0}")]
    Parse(String),
}

/// Whether the monic constant-first polynomial `coeffs` is irreducible over GF(p).
pub fn is_irreducible(p: u32, coeffs: &[u32]) -> bool {
    poly::is_irreducible(coeffs, p)
}
