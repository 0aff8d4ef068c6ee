//! Discrete derivatives, fiber tables and differential spectra.
//!
//! Functions are handled extensionally: a domain to sweep plus an evaluation
//! closure. Sweeps are split across the current rayon pool and merged by
//! summing counts, so the result does not depend on the schedule. Closures
//! passed to [`fiber_table`] may be called from several threads at once.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{ExtElement, Field, FieldElement, TowerField};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error("derivative direction must be nonzero")]
    ZeroDirection,
    #[error("exponent must be positive")]
    ZeroExponent,
    #[error("map is not a permutation of its domain")]
    NotAPermutation,
    #[error("the involution check only applies to odd exponents, got {0}")]
    EvenExponent(u64),
    #[error("cannot parse spectrum {0:?}")]
    Parse(String),
}

/// A finite set of points that can be swept.
pub trait Domain: Sync {
    type Point: Copy + Ord + Send + Sync;

    fn points(&self) -> Vec<Self::Point>;
}

/// All of `F`.
pub struct WholeField<'a>(pub &'a Field);

/// `F*`.
pub struct NonzeroElements<'a>(pub &'a Field);

/// The unit circle `U_E` of the quadratic extension.
pub struct UnitCircle {
    points: Vec<ExtElement>,
}

impl UnitCircle {
    pub fn new(tower: &TowerField) -> UnitCircle {
        UnitCircle {
            points: tower.unit_circle_elements(),
        }
    }
}

impl Domain for WholeField<'_> {
    type Point = FieldElement;

    fn points(&self) -> Vec<FieldElement> {
        self.0.elements().collect()
    }
}

impl Domain for NonzeroElements<'_> {
    type Point = FieldElement;

    fn points(&self) -> Vec<FieldElement> {
        self.0.units().collect()
    }
}

impl Domain for UnitCircle {
    type Point = ExtElement;

    fn points(&self) -> Vec<ExtElement> {
        self.points.clone()
    }
}

/// Fiber sizes `|g^{-1}({c})|` for every `c` in the codomain field.
#[derive(Debug, Clone)]
pub struct FiberTable<'f> {
    field: &'f Field,
    counts: Vec<u64>,
}

impl<'f> FiberTable<'f> {
    pub fn field(&self) -> &'f Field {
        self.field
    }

    pub fn count(&self, c: FieldElement) -> u64 {
        self.counts[c.index() as usize]
    }

    /// Counts indexed by canonical element order.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn domain_size(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FieldElement, u64)> + '_ {
        self.field.elements().zip(self.counts.iter().copied())
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Multiset of all fiber sizes, one per element of the codomain.
    pub fn spectrum(&self) -> SpectrumMultiset {
        SpectrumMultiset::from_sizes(self.counts.iter().copied())
    }
}

impl PartialEq for FiberTable<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(other.field) && self.counts == other.counts
    }
}

/// Sweeps `domain` once and counts the images of `g` in `field`.
pub fn fiber_table<'f, D, G>(field: &'f Field, domain: &D, g: G) -> FiberTable<'f>
where
    D: Domain,
    G: Fn(D::Point) -> FieldElement + Sync,
{
    let points = domain.points();
    let q = field.order() as usize;
    let count_chunk = |chunk: &[D::Point]| {
        let mut counts = vec![0u64; q];
        for &x in chunk {
            counts[g(x).index() as usize] += 1;
        }
        counts
    };
    let counts = if points.len() <= CHUNK {
        count_chunk(&points)
    } else {
        points
            .par_chunks(CHUNK)
            .map(count_chunk)
            .reduce(
                || vec![0u64; q],
                |mut acc, part| {
                    acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                    acc
                },
            )
    };
    FiberTable { field, counts }
}

/// The fibers themselves, keyed by image, each in canonical order.
pub fn fibers<D, G>(domain: &D, g: G) -> BTreeMap<FieldElement, Vec<D::Point>>
where
    D: Domain,
    G: Fn(D::Point) -> FieldElement,
{
    let mut out: BTreeMap<FieldElement, Vec<D::Point>> = BTreeMap::new();
    for x in domain.points() {
        out.entry(g(x)).or_default().push(x);
    }
    out
}

/// `x -> f(x + a) - f(x)`.
pub fn discrete_derivative<'a, G>(
    field: &'a Field,
    f: G,
    a: FieldElement,
) -> Result<impl Fn(FieldElement) -> FieldElement + Sync + 'a, SpectraError>
where
    G: Fn(FieldElement) -> FieldElement + Sync + 'a,
{
    if a.is_zero() {
        return Err(SpectraError::ZeroDirection);
    }
    Ok(move |x| field.sub(f(field.add(x, a)), f(x)))
}

/// Fiber table of `x -> (x + a)^d - x^d` over `F`.
pub fn derivative_fiber_table(
    field: &Field,
    d: u64,
    a: FieldElement,
) -> Result<FiberTable<'_>, SpectraError> {
    if d == 0 {
        return Err(SpectraError::ZeroExponent);
    }
    let delta = discrete_derivative(field, move |x| field.pow(x, d), a)?;
    Ok(fiber_table(field, &WholeField(field), delta))
}

/// Multiset of fiber sizes of `x -> (x + 1)^d - x^d`.
pub fn reduced_spectrum(field: &Field, d: u64) -> Result<SpectrumMultiset, SpectraError> {
    Ok(derivative_fiber_table(field, d, field.one())?.spectrum())
}

/// Full differential spectrum over all `(a, b)` in `F* x F`, obtained by
/// scaling the reduced spectrum by `q - 1`.
pub fn full_spectrum(field: &Field, d: u64) -> Result<SpectrumMultiset, SpectraError> {
    Ok(reduced_spectrum(field, d)?.scaled(field.unit_order()))
}

/// Full differential spectrum by sweeping every direction `a`. Quadratic in
/// `q`; it is the check on [`full_spectrum`].
pub fn full_spectrum_brute_force(field: &Field, d: u64) -> Result<SpectrumMultiset, SpectraError> {
    if d == 0 {
        return Err(SpectraError::ZeroExponent);
    }
    let per_direction: Vec<SpectrumMultiset> = field
        .units()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| {
            derivative_fiber_table(field, d, a)
                .expect("a is nonzero and d positive")
                .spectrum()
        })
        .collect();
    Ok(per_direction
        .iter()
        .fold(SpectrumMultiset::default(), |acc, s| acc.union(s)))
}

/// Largest differential multiplicity of `x^d`.
pub fn differential_uniformity(field: &Field, d: u64) -> Result<u64, SpectraError> {
    Ok(derivative_fiber_table(field, d, field.one())?.max_count())
}

pub fn is_apn(field: &Field, d: u64) -> Result<bool, SpectraError> {
    Ok(differential_uniformity(field, d)? == 2)
}

/// Whether `pi` permutes `F`.
pub fn is_permutation<P>(field: &Field, pi: P) -> bool
where
    P: Fn(FieldElement) -> FieldElement + Sync,
{
    fiber_table(field, &WholeField(field), pi)
        .counts()
        .iter()
        .all(|&c| c == 1)
}

/// Which side a permutation is composed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `g o pi`
    Pre,
    /// `pi o g`
    Post,
}

/// Checks that composing `g` with the permutation `pi` leaves the multiset of
/// fiber sizes unchanged, together with the pointwise relation on fibers:
/// `|(g o pi)^{-1}(b)| = |g^{-1}(b)|` and `|(pi o g)^{-1}(pi(c))| = |g^{-1}(c)|`.
pub fn multiset_equal_under_permutation<G, P>(
    field: &Field,
    g: G,
    pi: P,
    side: Side,
) -> Result<bool, SpectraError>
where
    G: Fn(FieldElement) -> FieldElement + Sync,
    P: Fn(FieldElement) -> FieldElement + Sync,
{
    if !is_permutation(field, &pi) {
        return Err(SpectraError::NotAPermutation);
    }
    let domain = WholeField(field);
    let base = fiber_table(field, &domain, &g);
    let composed = match side {
        Side::Pre => fiber_table(field, &domain, |x| g(pi(x))),
        Side::Post => fiber_table(field, &domain, |x| pi(g(x))),
    };
    let pointwise = match side {
        Side::Pre => field.elements().all(|b| composed.count(b) == base.count(b)),
        Side::Post => field.elements().all(|c| composed.count(pi(c)) == base.count(c)),
    };
    Ok(pointwise && composed.spectrum() == base.spectrum())
}

/// For odd `d`, every fiber of `x -> (x + 1)^d - x^d` is closed under
/// `x -> -1 - x`. No claim is made for even `d`.
pub fn derivative_fibers_closed_under_involution(
    field: &Field,
    d: u64,
) -> Result<bool, SpectraError> {
    if d.is_multiple_of(2) {
        return Err(SpectraError::EvenExponent(d));
    }
    let minus_one = field.neg(field.one());
    let delta = discrete_derivative(field, move |x| field.pow(x, d), field.one())?;
    Ok(field
        .elements()
        .all(|x| delta(field.sub(minus_one, x)) == delta(x)))
}

/// One `count[size]` term of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub size: u64,
    pub count: u64,
}

/// Multiset of fiber sizes, written `n1[a1] + ... + nt[at]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectrumMultiset {
    entries: Vec<SpectrumEntry>,
}

impl SpectrumMultiset {
    pub fn from_sizes(sizes: impl IntoIterator<Item = u64>) -> SpectrumMultiset {
        let mut map = BTreeMap::new();
        for s in sizes {
            *map.entry(s).or_insert(0u64) += 1;
        }
        Self::from_map(map)
    }

    /// From `(size, count)` pairs; repeated sizes are merged, zero counts dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> SpectrumMultiset {
        let mut map = BTreeMap::new();
        for (size, count) in pairs {
            *map.entry(size).or_insert(0u64) += count;
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<u64, u64>) -> SpectrumMultiset {
        SpectrumMultiset {
            entries: map
                .into_iter()
                .filter(|&(_, c)| c > 0)
                .map(|(size, count)| SpectrumEntry { size, count })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn count_of(&self, size: u64) -> u64 {
        self.entries
            .iter()
            .find(|e| e.size == size)
            .map_or(0, |e| e.count)
    }

    pub fn max_size(&self) -> Option<u64> {
        self.entries.last().map(|e| e.size)
    }

    /// Number of fibers counted.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Sum of `size * count`, the size of the domain the fibers partition.
    pub fn total_mass(&self) -> u64 {
        self.entries.iter().map(|e| e.size * e.count).sum()
    }

    pub fn scaled(&self, factor: u64) -> SpectrumMultiset {
        Self::from_pairs(self.entries.iter().map(|e| (e.size, e.count * factor)))
    }

    pub fn union(&self, other: &SpectrumMultiset) -> SpectrumMultiset {
        Self::from_pairs(
            self.entries
                .iter()
                .chain(&other.entries)
                .map(|e| (e.size, e.count)),
        )
    }
}

impl fmt::Display for SpectrumMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{}[{}]", e.count, e.size))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl FromStr for SpectrumMultiset {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpectraError::Parse(s.to_string());
        if s.trim() == "0" {
            return Ok(SpectrumMultiset::default());
        }
        let pairs = s
            .split('+')
            .map(|term| {
                let (count, rest) = term.trim().split_once('[').ok_or_else(bad)?;
                let size = rest.strip_suffix(']').ok_or_else(bad)?;
                Ok((
                    size.trim().parse().map_err(|_| bad())?,
                    count.trim().parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<Vec<(u64, u64)>, SpectraError>>()?;
        Ok(SpectrumMultiset::from_pairs(pairs))
    }
}
