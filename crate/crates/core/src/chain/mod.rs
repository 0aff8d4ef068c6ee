//! The power function `x^d`, `d = ((3^n+1)/2) / ((3^k+1)/2)`, over GF(3^n)
//! for odd `n` and even `k` coprime to `n`, together with the chain of maps
//! that carries its derivative to a symmetric rational function and the
//! closed-form fiber sizes at every step.
//!
//! Every map is exposed for evaluation and every claimed identity as a
//! checkable operation; nothing here is taken on trust.

mod cover;
mod identities;

use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Field, FieldElement, FieldError, TowerField};
use crate::numth::{resolve_exponent, FractionalExponent, NumthError};
use crate::spectra::{self, Domain, FiberTable, NonzeroElements, SpectrumMultiset, UnitCircle, WholeField};

pub use cover::{
    averaging_identity_holds, classify_c, kappa, lambda, mu, mu_fiber, mu_fibers_by_scan,
    mu_preimage_of_base, CoverClass,
};
pub use identities::{
    f4_general, f4_mu, polynomial_identity_checks, sign_identity_check, sigma_sign,
    symmetry_identity_check, tau_sign, FiberStructureReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Numth(#[from] NumthError),
    #[error("{point} is outside the domain of {map}")]
    Domain { point: String, map: &'static str },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// `(p^j + 1)/2` as an exact integer.
pub(crate) fn half_plus(p: u32, j: u32) -> BigUint {
    (BigUint::from(p).pow(j) + 1u32) / 2u32
}

/// Residue of a positive exponent in `[1, modulus]`, so that `0^e` stays 0.
pub(crate) fn exponent_residue(e: &BigUint, modulus: u64) -> u64 {
    match (e % modulus).to_u64().expect("residue fits") {
        0 => modulus,
        r => r,
    }
}

/// Sweeps a fallible map, keeping the first error raised by any worker.
pub(crate) fn try_fiber_table<'f, D, G>(
    field: &'f Field,
    domain: &D,
    g: G,
) -> Result<FiberTable<'f>, ChainError>
where
    D: Domain,
    G: Fn(D::Point) -> Result<FieldElement, ChainError> + Sync,
{
    let failure: Mutex<Option<ChainError>> = Mutex::new(None);
    let table = spectra::fiber_table(field, domain, |x| {
        g(x).unwrap_or_else(|e| {
            failure.lock().unwrap().get_or_insert(e);
            field.zero()
        })
    });
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(table),
    }
}

/// Validated parameters `(n, k)` and the derived exponents.
#[derive(Debug, Clone)]
pub struct ChainContext {
    n: u32,
    k: u32,
    field: Arc<Field>,
    tower: TowerField,
    d1: BigUint,
    d2: BigUint,
    e2: BigUint,
    d: u64,
    d1_res: u64,
    d2_res: u64,
    twice_d2_res: u64,
    e2_res: u64,
}

impl ChainContext {
    /// Checks every hypothesis up front and reports the first failure by name.
    pub fn new(n: u32, k: u32) -> Result<ChainContext, ChainError> {
        if n.is_multiple_of(2) {
            return Err(ChainError::Hypothesis(format!("n must be odd, got {n}")));
        }
        if k == 0 || k % 2 == 1 {
            return Err(ChainError::Hypothesis(format!(
                "k must be even and positive, got {k}"
            )));
        }
        if n.gcd(&k) != 1 {
            return Err(ChainError::Hypothesis(format!(
                "gcd(n, k) must be 1, got gcd({n}, {k}) = {}",
                n.gcd(&k)
            )));
        }
        let field = Arc::new(Field::new(3, n, None)?);
        let m = field.unit_order();
        let d1 = half_plus(3, n);
        let d2 = half_plus(3, k);
        let e2 = (BigUint::from(3u32).pow(k) - 1u32) / 2u32;
        let g = (&d2 % m).to_u64().unwrap().gcd(&m);
        if g != 1 {
            return Err(ChainError::Hypothesis(format!("gcd(d2, q - 1) must be 1, got {g}")));
        }
        let d = resolve_exponent(&FractionalExponent::new(d1.clone(), d2.clone())?, m)?.value;
        if d % 2 == 1 {
            return Err(ChainError::Hypothesis(format!("d must be even, got {d}")));
        }
        let ge = (&e2 % m).to_u64().unwrap().gcd(&m);
        if ge != 2 {
            return Err(ChainError::Hypothesis(format!("gcd(e2, q - 1) must be 2, got {ge}")));
        }
        let tower = TowerField::new(field.clone());
        Ok(ChainContext {
            n,
            k,
            d1_res: exponent_residue(&d1, m),
            d2_res: exponent_residue(&d2, m),
            twice_d2_res: exponent_residue(&(&d2 * 2u32), m),
            e2_res: exponent_residue(&e2, m),
            field,
            tower,
            d1,
            d2,
            e2,
            d,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    /// `(3^n + 1)/2`.
    pub fn d1(&self) -> &BigUint {
        &self.d1
    }

    /// `(3^k + 1)/2`.
    pub fn d2(&self) -> &BigUint {
        &self.d2
    }

    /// `(3^k - 1)/2`.
    pub fn e2(&self) -> &BigUint {
        &self.e2
    }

    /// The resolved exponent `d` in `[1, q - 1]`.
    pub fn d(&self) -> u64 {
        self.d
    }

    pub(crate) fn e2_residue(&self) -> u64 {
        self.e2_res
    }

    /// `x -> (x + 1)^d - x^d`.
    pub fn derivative(&self, x: FieldElement) -> FieldElement {
        let f = &*self.field;
        f.sub(f.pow(f.add(x, f.one()), self.d), f.pow(x, self.d))
    }

    /// `x^(q-2) + 1`, i.e. `1/x + 1` away from 0.
    pub fn pi(&self, x: FieldElement) -> FieldElement {
        let f = &*self.field;
        f.add(f.pow(x, f.order() as u64 - 2), f.one())
    }

    /// `x -> x^d2`.
    pub fn sigma_perm(&self, x: FieldElement) -> FieldElement {
        self.field.pow(x, self.d2_res)
    }

    /// `x -> (x - 2)/4`.
    pub fn tau_perm(&self, x: FieldElement) -> FieldElement {
        let f = &*self.field;
        let quarter = f.inv(f.from_int(4)).expect("4 is invertible in odd characteristic");
        f.mul(f.sub(x, f.from_int(2)), quarter)
    }

    fn quotient(&self, num: FieldElement, den: FieldElement, map: &str) -> Result<FieldElement, ChainError> {
        self.field
            .div(num, den)
            .map_err(|_| ChainError::Invariant(format!("zero denominator in {map}")))
    }

    /// `f1(1) = 1`, else `(x^d - 1)/(x - 1)^d`.
    pub fn f1(&self, x: FieldElement) -> Result<FieldElement, ChainError> {
        let f = &*self.field;
        if x == f.one() {
            return Ok(f.one());
        }
        let num = f.sub(f.pow(x, self.d), f.one());
        let den = f.pow(f.sub(x, f.one()), self.d);
        self.quotient(num, den, "f1")
    }

    /// `f2(1) = 1`, else `(x^d1 - 1)^d2 / (x^d2 - 1)^d1`.
    pub fn f2(&self, x: FieldElement) -> Result<FieldElement, ChainError> {
        let f = &*self.field;
        if x == f.one() {
            return Ok(f.one());
        }
        let num = f.pow(f.sub(f.pow(x, self.d1_res), f.one()), self.d2_res);
        let den = f.pow(f.sub(f.pow(x, self.d2_res), f.one()), self.d1_res);
        self.quotient(num, den, "f2")
    }

    /// `((x+1)^d1 - x^d1)^d2 / ((x+1)^d2 - x^d2)^d1`.
    pub fn f3(&self, x: FieldElement) -> Result<FieldElement, ChainError> {
        let f = &*self.field;
        let x1 = f.add(x, f.one());
        let num = f.pow(f.sub(f.pow(x1, self.d1_res), f.pow(x, self.d1_res)), self.d2_res);
        let den = f.pow(f.sub(f.pow(x1, self.d2_res), f.pow(x, self.d2_res)), self.d1_res);
        self.quotient(num, den, "f3")
    }

    /// `((x+2)^d1 - (x-2)^d1)^d2 / ((x+2)^d2 - (x-2)^d2)^d1`.
    pub fn f4(&self, x: FieldElement) -> Result<FieldElement, ChainError> {
        f4_general(&self.field, self.d1_res, self.d2_res, x)
    }

    /// `1` on `F_3`, else `1 + eta(1 - c^(3^k + 1))`.
    pub fn predicted_fiber_size(&self, c: FieldElement) -> u64 {
        let f = &*self.field;
        if f.in_prime_field(c) {
            return 1;
        }
        let t = f.sub(f.one(), f.pow(c, self.twice_d2_res));
        (1 + f.quadratic_character(t) as i64) as u64
    }

    /// Fiber sizes of `f4 o kappa` on `F*`: 0 at `c = 0`, else `1 + eta(1 - c^2)`.
    pub fn predicted_kappa_fibers(&self, c: FieldElement) -> u64 {
        if c.is_zero() {
            0
        } else {
            self.one_plus_eta(c)
        }
    }

    /// Fiber sizes of `f4 o lambda` on `U_E`: `1 + eta(1 - c^2)`.
    pub fn predicted_lambda_fibers(&self, c: FieldElement) -> u64 {
        self.one_plus_eta(c)
    }

    /// Fiber sizes of `f4` on `F`: 1 on `F_3`, else `1 + eta(1 - c^2)`.
    pub fn predicted_f4_fibers(&self, c: FieldElement) -> u64 {
        if self.field.in_prime_field(c) {
            1
        } else {
            self.one_plus_eta(c)
        }
    }

    fn one_plus_eta(&self, c: FieldElement) -> u64 {
        let f = &*self.field;
        (1 + f.quadratic_character(f.sub(f.one(), f.square(c))) as i64) as u64
    }

    /// The spectrum the theorem predicts: `((q-3)/2)[0] + 3[1] + ((q-3)/2)[2]`.
    pub fn predicted_spectrum(&self) -> SpectrumMultiset {
        let half = (self.field.order() as u64 - 3) / 2;
        SpectrumMultiset::from_pairs([(0, half), (1, 3), (2, half)])
    }

    pub fn stage_table(&self, stage: ChainStage) -> Result<FiberTable<'_>, ChainError> {
        let f = &*self.field;
        let all = WholeField(f);
        match stage {
            ChainStage::Derivative => Ok(spectra::fiber_table(f, &all, |x| self.derivative(x))),
            ChainStage::F1 => try_fiber_table(f, &all, |x| self.f1(x)),
            ChainStage::F2 => try_fiber_table(f, &all, |x| self.f2(x)),
            ChainStage::F3 => try_fiber_table(f, &all, |x| self.f3(x)),
            ChainStage::F4 => try_fiber_table(f, &all, |x| self.f4(x)),
        }
    }

    /// Fiber multisets of the derivative and of `f1`..`f4`, in chain order.
    pub fn chain_spectra(&self) -> Result<Vec<(ChainStage, SpectrumMultiset)>, ChainError> {
        ChainStage::ALL
            .iter()
            .map(|&s| Ok((s, self.stage_table(s)?.spectrum())))
            .collect()
    }

    /// Pointwise links between consecutive stages on all of `F`:
    /// `D = f1 o pi`, `f2 = sigma o f1 o sigma`, `f3 = f2 o pi`, `f4 = f3 o tau`.
    pub fn chain_relations_hold(&self) -> Result<bool, ChainError> {
        for x in self.field.elements() {
            if self.derivative(x) != self.f1(self.pi(x))?
                || self.f2(x)? != self.sigma_perm(self.f1(self.sigma_perm(x))?)
                || self.f3(x)? != self.f2(self.pi(x))?
                || self.f4(x)? != self.f3(self.tau_perm(x))?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Brute-force fiber sizes of `target` against its closed form, for every `c`.
    pub fn verify(&self, target: Target) -> Result<VerificationReport, ChainError> {
        let f = &*self.field;
        let table = match target {
            Target::Derivative => self.stage_table(ChainStage::Derivative)?,
            Target::F4 => self.stage_table(ChainStage::F4)?,
            Target::Kappa => try_fiber_table(f, &NonzeroElements(f), |x| self.f4(kappa(f, x)?))?,
            Target::Lambda => {
                let circle = UnitCircle::new(&self.tower);
                try_fiber_table(f, &circle, |x| self.f4(lambda(&self.tower, x)?))?
            }
        };
        let predict = |c| match target {
            Target::Derivative => self.predicted_fiber_size(c),
            Target::F4 => self.predicted_f4_fibers(c),
            Target::Kappa => self.predicted_kappa_fibers(c),
            Target::Lambda => self.predicted_lambda_fibers(c),
        };
        let records: Vec<FiberRecord> = table
            .iter()
            .map(|(c, brute)| {
                let predicted = predict(c);
                FiberRecord {
                    c: f.format(c),
                    index: c.index(),
                    brute,
                    predicted,
                    matches: brute == predicted,
                }
            })
            .collect();
        Ok(VerificationReport {
            target,
            n: self.n,
            k: self.k,
            d: self.d,
            field: f.description(),
            all_match: records.iter().all(|r| r.matches),
            records,
        })
    }

    /// The structural facts about the two covers, checked exhaustively.
    pub fn fiber_structure_checks(&self) -> Result<FiberStructureReport, ChainError> {
        identities::fiber_structure_checks(self)
    }
}

/// A link of the chain from the derivative to `f4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainStage {
    #[serde(rename = "delta")]
    Derivative,
    F1,
    F2,
    F3,
    F4,
}

impl ChainStage {
    pub const ALL: [ChainStage; 5] = [
        ChainStage::Derivative,
        ChainStage::F1,
        ChainStage::F2,
        ChainStage::F3,
        ChainStage::F4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChainStage::Derivative => "delta",
            ChainStage::F1 => "f1",
            ChainStage::F2 => "f2",
            ChainStage::F3 => "f3",
            ChainStage::F4 => "f4",
        }
    }
}

/// Which map a verification report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// The derivative of `x^d` on `F`.
    Derivative,
    /// `f4` on `F`.
    F4,
    /// `f4 o kappa` on `F*`.
    Kappa,
    /// `f4 o lambda` on `U_E`.
    Lambda,
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberRecord {
    pub c: String,
    pub index: u32,
    pub brute: u64,
    pub predicted: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub target: Target,
    pub n: u32,
    pub k: u32,
    pub d: u64,
    pub field: String,
    pub records: Vec<FiberRecord>,
    pub all_match: bool,
}

impl VerificationReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &FiberRecord> {
        self.records.iter().filter(|r| !r.matches)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{multiset_equal_under_permutation, Side};

    #[test]
    fn context_validation() {
        let ctx = ChainContext::new(3, 2).unwrap();
        assert_eq!(ctx.d(), 8);
        assert_eq!(ctx.d1(), &BigUint::from(14u32));
        assert_eq!(ctx.d2(), &BigUint::from(5u32));
        assert_eq!(ctx.e2(), &BigUint::from(4u32));
        assert!(matches!(ChainContext::new(4, 2), Err(ChainError::Hypothesis(_))));
        assert!(matches!(ChainContext::new(3, 3), Err(ChainError::Hypothesis(_))));
        assert!(matches!(ChainContext::new(3, 0), Err(ChainError::Hypothesis(_))));
        assert!(matches!(ChainContext::new(3, 6), Err(ChainError::Hypothesis(_))));
        let e = ChainContext::new(3, 3).unwrap_err().to_string();
        assert!(e.contains("k must be even"), "{e}");
    }

    #[test]
    fn pi_examples() {
        let ctx = ChainContext::new(3, 2).unwrap();
        let f = ctx.field();
        assert_eq!(ctx.pi(f.zero()), f.one());
        assert_eq!(ctx.pi(f.one()), f.from_int(2));
        assert!(spectra::is_permutation(f, |x| ctx.pi(x)));
        for x in f.units() {
            assert_eq!(ctx.pi(x), f.add(f.inv(x).unwrap(), f.one()));
        }
    }

    #[test]
    fn permutations_are_bijective() {
        for (n, k) in [(3, 2), (5, 2), (5, 4)] {
            let ctx = ChainContext::new(n, k).unwrap();
            let f = ctx.field();
            assert!(spectra::is_permutation(f, |x| ctx.sigma_perm(x)));
            assert!(spectra::is_permutation(f, |x| ctx.tau_perm(x)));
        }
    }

    #[test]
    fn fixed_points_of_piecewise_maps() {
        let ctx = ChainContext::new(3, 2).unwrap();
        let f = ctx.field();
        assert_eq!(ctx.f1(f.one()).unwrap(), f.one());
        assert_eq!(ctx.f2(f.one()).unwrap(), f.one());
    }

    #[test]
    fn chain_relations_and_spectra() {
        for (n, k) in [(3, 2), (5, 2), (5, 4)] {
            let ctx = ChainContext::new(n, k).unwrap();
            assert!(ctx.chain_relations_hold().unwrap());
            let spectra = ctx.chain_spectra().unwrap();
            for (_, s) in &spectra {
                assert_eq!(s, &ctx.predicted_spectrum());
            }
        }
    }

    #[test]
    fn f1_composed_with_pi_gives_derivative_table() {
        let ctx = ChainContext::new(3, 2).unwrap();
        let f = ctx.field();
        let f1 = |x| ctx.f1(x).unwrap();
        assert!(multiset_equal_under_permutation(f, f1, |x| ctx.pi(x), Side::Pre).unwrap());
        let composed = spectra::fiber_table(f, &WholeField(f), |x| f1(ctx.pi(x)));
        assert_eq!(composed, ctx.stage_table(ChainStage::Derivative).unwrap());
    }

    #[test]
    fn theorem_per_fiber_small() {
        let ctx = ChainContext::new(3, 2).unwrap();
        let report = ctx.verify(Target::Derivative).unwrap();
        assert!(report.all_match);
        assert_eq!(report.records.len(), 27);
        assert_eq!(report.records.iter().map(|r| r.predicted).sum::<u64>(), 27);
        let ones = report.records.iter().filter(|r| r.predicted == 1).count();
        let twos = report.records.iter().filter(|r| r.predicted == 2).count();
        assert_eq!((ones, twos), (3, 12));
        assert_eq!(ctx.predicted_fiber_size(ctx.field().zero()), 1);
    }

    #[test]
    fn cover_predictions_small() {
        let ctx = ChainContext::new(3, 2).unwrap();
        let f = ctx.field();
        assert_eq!(ctx.predicted_kappa_fibers(f.zero()), 0);
        assert_eq!(ctx.predicted_lambda_fibers(f.zero()), 2);
        for c in [f.zero(), f.one(), f.from_int(-1)] {
            assert_eq!(ctx.predicted_f4_fibers(c), 1);
        }
        for t in [Target::F4, Target::Kappa, Target::Lambda] {
            assert!(ctx.verify(t).unwrap().all_match, "{t:?}");
        }
    }

    #[test]
    fn exponent_residues_stay_positive() {
        assert_eq!(exponent_residue(&BigUint::from(26u32), 26), 26);
        assert_eq!(exponent_residue(&BigUint::from(27u32), 26), 1);
        assert_eq!(half_plus(3, 3), BigUint::from(14u32));
    }
}
