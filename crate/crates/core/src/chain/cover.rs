//! The map `mu(x) = x + 1/x` on `E*`, which covers `F` twice: once from `F*`
//! (as `kappa`) and once from the unit circle `U_E` (as `lambda`).

use std::collections::BTreeMap;

use serde::Serialize;

use super::{try_fiber_table, ChainError};
use crate::gf::{ExtElement, Field, FieldElement, TowerField};
use crate::spectra::{self, NonzeroElements, UnitCircle, WholeField};

/// `x + 1/x` on `E*`.
pub fn mu(tower: &TowerField, x: ExtElement) -> Result<ExtElement, ChainError> {
    let inv = tower.inv(x).map_err(|_| ChainError::Domain {
        point: tower.format(x),
        map: "mu",
    })?;
    Ok(tower.add(x, inv))
}

/// `mu` restricted to `F*`.
pub fn kappa(field: &Field, x: FieldElement) -> Result<FieldElement, ChainError> {
    let inv = field.inv(x).map_err(|_| ChainError::Domain {
        point: field.format(x),
        map: "kappa",
    })?;
    Ok(field.add(x, inv))
}

/// `mu` restricted to `U_E`; its values lie in `F`.
pub fn lambda(tower: &TowerField, x: ExtElement) -> Result<FieldElement, ChainError> {
    if !tower.is_on_unit_circle(x) {
        return Err(ChainError::Domain {
            point: tower.format(x),
            map: "lambda",
        });
    }
    tower
        .to_base(mu(tower, x)?)
        .ok_or_else(|| ChainError::Invariant(format!("lambda({}) left F", tower.format(x))))
}

/// `G = {2, -2}`; otherwise `H` when `c^2 - 4` is a nonzero square, `I` when not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CoverClass {
    G,
    H,
    I,
}

pub fn classify_c(field: &Field, c: FieldElement) -> CoverClass {
    match field.quadratic_character(field.sub(field.square(c), field.from_int(4))) {
        0 => CoverClass::G,
        1 => CoverClass::H,
        _ => CoverClass::I,
    }
}

/// `mu^{-1}({c})` for `c` in `F`: the roots `(c +- y)/2` of `x^2 - cx + 1`,
/// where `y^2 = c^2 - 4`. Sorted, without repeats.
pub fn mu_fiber(tower: &TowerField, c: FieldElement) -> Vec<ExtElement> {
    let f = tower.base();
    let y = tower.sqrt_of_base(f.sub(f.square(c), f.from_int(4)));
    let half = f.inv(f.from_int(2)).expect("2 is invertible in odd characteristic");
    let cc = tower.embed(c);
    let mut out = vec![
        tower.scale(half, tower.add(cc, y)),
        tower.scale(half, tower.sub(cc, y)),
    ];
    out.sort();
    out.dedup();
    out
}

/// All `x` in `E*` with `mu(x)` in `F`, found by scanning `E*`.
pub fn mu_preimage_of_base(tower: &TowerField) -> Vec<ExtElement> {
    tower
        .units()
        .filter(|&x| tower.to_base(mu(tower, x).expect("x is a unit")).is_some())
        .collect()
}

/// Every fiber of `mu` over an element of `F`, found by scanning `E*`.
pub fn mu_fibers_by_scan(tower: &TowerField) -> BTreeMap<FieldElement, Vec<ExtElement>> {
    let mut out: BTreeMap<FieldElement, Vec<ExtElement>> = BTreeMap::new();
    for x in tower.units() {
        if let Some(c) = tower.to_base(mu(tower, x).expect("x is a unit")) {
            out.entry(c).or_default().push(x);
        }
    }
    out
}

/// Checks `|phi^{-1}(c)| = (|chi^{-1}(c)| + |psi^{-1}(c)|)/2` for every `c`,
/// where `chi = phi o kappa` on `F*` and `psi = phi o lambda` on `U_E`.
pub fn averaging_identity_holds<P>(tower: &TowerField, phi: P) -> Result<bool, ChainError>
where
    P: Fn(FieldElement) -> FieldElement + Sync,
{
    let f = tower.base();
    let direct = spectra::fiber_table(f, &WholeField(f), &phi);
    let chi = try_fiber_table(f, &NonzeroElements(f), |x| Ok(phi(kappa(f, x)?)))?;
    let psi = try_fiber_table(f, &UnitCircle::new(tower), |x| Ok(phi(lambda(tower, x)?)))?;
    Ok(f
        .elements()
        .all(|c| 2 * direct.count(c) == chi.count(c) + psi.count(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn tower(n: u32) -> TowerField {
        TowerField::new(Arc::new(Field::new(3, n, None).unwrap()))
    }

    #[test]
    fn fibers_over_plus_minus_two() {
        let t = tower(3);
        let f = t.base();
        let scan = mu_fibers_by_scan(&t);
        assert_eq!(scan[&f.from_int(2)], vec![t.one()]);
        assert_eq!(scan[&f.from_int(-2)], vec![t.neg(t.one())]);
        assert_eq!(mu_fiber(&t, f.from_int(2)), vec![t.one()]);
    }

    #[test]
    fn closed_form_fiber_matches_scan() {
        let t = tower(3);
        let f = t.base();
        let scan = mu_fibers_by_scan(&t);
        for c in f.elements() {
            assert_eq!(mu_fiber(&t, c), scan[&c]);
            let expected = match classify_c(f, c) {
                CoverClass::G => 1,
                _ => 2,
            };
            assert_eq!(scan[&c].len(), expected);
        }
    }

    #[test]
    fn preimage_of_base_is_units_and_circle() {
        let t = tower(3);
        let f = t.base();
        let found: BTreeSet<_> = mu_preimage_of_base(&t).into_iter().collect();
        let expected: BTreeSet<_> = f
            .units()
            .map(|x| t.embed(x))
            .chain(t.unit_circle_elements())
            .collect();
        assert_eq!(found, expected);
        assert_eq!(found.len(), 26 + 28 - 2);
    }

    #[test]
    fn domain_errors() {
        let t = tower(3);
        assert!(matches!(mu(&t, t.zero()), Err(ChainError::Domain { .. })));
        assert!(matches!(kappa(t.base(), t.base().zero()), Err(ChainError::Domain { .. })));
        assert!(matches!(lambda(&t, t.generator()), Err(ChainError::Domain { .. })));
    }

    #[test]
    fn averaging_for_identity() {
        let t = tower(3);
        assert!(averaging_identity_holds(&t, |c| c).unwrap());
        let f = t.base();
        let k = f.one();
        assert!(averaging_identity_holds(&t, move |_| k).unwrap());
    }
}
