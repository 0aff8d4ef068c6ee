// Valuations, gcd identities and fractional exponents.

use std::error::Error;

use apn_spectra::numth::{
    gcd_power_minus, gcd_power_plus_minus, resolve_exponent, v2_closed_form, vp,
    FractionalExponent, Sign,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("v_3(54) = {}", vp(54, 3)?);
    println!("v_2(0) = {}", vp(0, 2)?);
    println!("v_2(3^4 - 1) = {}", v2_closed_form(3, 4, Sign::Minus)?);
    println!("v_2(3^4 + 1) = {}", v2_closed_form(3, 4, Sign::Plus)?);

    println!("gcd(3^4 - 1, 3^6 - 1) = {}", gcd_power_minus(3, 4, 6)?);
    println!("gcd(3^2 + 1, 3^3 - 1) = {}", gcd_power_plus_minus(3, 2, 3, false)?);

    for (text, modulus) in [("28/10", 26), ("244/10", 242), ("10/28", 26)] {
        let fe: FractionalExponent = text.parse()?;
        match resolve_exponent(&fe, modulus) {
            Ok(r) => println!("{text} mod {modulus} = {}", r.value),
            Err(e) => println!("{text} mod {modulus}: {e}"),
        }
    }
    let d = resolve_exponent(&"28/10".parse()?, 26)?.value;
    if d != 8 {
        return Err(format!("expected 8, got {d}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
