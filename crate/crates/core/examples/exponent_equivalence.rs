// Exponent classes and the equation form (3^m + 1) d - 2 = k (3^n - 1).

use std::error::Error;

use apn_spectra::equiv::{
    all_classes, are_equivalent, equivalence_class, fraction_to_zha_wang, zha_wang_to_fraction,
    ZhaWangParams,
};
use apn_spectra::gf::Field;
use apn_spectra::spectra::reduced_spectrum;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let class = equivalence_class(8, 3, 3)?;
    println!("class of 8 mod 26: {:?}", class.members);
    println!("8 ~ 20: {}, 8 ~ 7: {}", are_equivalent(8, 20, 3, 3)?, are_equivalent(8, 7, 3, 3)?);

    let f = Field::new(3, 3, None)?;
    for c in all_classes(3, 3)? {
        let spectra: Vec<String> = c
            .members
            .iter()
            .map(|&d| reduced_spectrum(&f, d).map(|s| s.to_string()))
            .collect::<Result<_, _>>()?;
        if spectra.iter().any(|s| *s != spectra[0]) {
            return Err(format!("class {:?} mixes spectra", c.members).into());
        }
        println!("{:<14} {}", format!("{:?}", c.members), spectra[0]);
    }

    let zw = ZhaWangParams::try_from((3, 1, 20))?;
    let form = zha_wang_to_fraction(&zw)?;
    println!("{zw:?} -> j = {}, {} = {}", form.j, form.fraction, form.resolved);
    let back = fraction_to_zha_wang(3, 2)?;
    println!("(n=3, j=2) -> {back:?}, equation holds: {}", back.equation_holds());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
