// Sign and symmetry rules for f4(x + 1/x) in several characteristics.

use std::error::Error;
use std::sync::Arc;

use apn_spectra::chain::{
    polynomial_identity_checks, sign_identity_check, sigma_sign, symmetry_identity_check, tau_sign,
};
use apn_spectra::gf::{Field, TowerField};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (p, n, j, k) in [(3, 3, 3, 2), (3, 3, 1, 2), (5, 1, 1, 2), (5, 3, 1, 2), (7, 1, 1, 2), (3, 5, 5, 4)] {
        let tower = TowerField::new(Arc::new(Field::new(p, n, None)?));
        let sign = sign_identity_check(&tower, j, k)?;
        let symmetry = symmetry_identity_check(&tower, j, k)?;
        let poly = polynomial_identity_checks(&tower, j);
        println!(
            "GF({p}^{n}) j={j} k={k} sigma={:+} tau={:+}: sign {sign}, symmetry {symmetry}, polynomial {poly}",
            sigma_sign(p, j, k),
            tau_sign(p, j)
        );
        if !(sign && symmetry && poly) {
            return Err(format!("identity failed over GF({p}^{n})").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
