// Differential spectra of power maps and the APN test.

use std::error::Error;

use apn_spectra::gf::Field;
use apn_spectra::spectra::{
    derivative_fiber_table, differential_uniformity, full_spectrum, full_spectrum_brute_force,
    reduced_spectrum,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let f = Field::new(3, 3, None)?;
    for d in [1, 2, 7, 8, 20] {
        println!(
            "x^{d:<2} reduced {:<28} uniformity {}",
            reduced_spectrum(&f, d)?.to_string(),
            differential_uniformity(&f, d)?
        );
    }

    let scaled = full_spectrum(&f, 8)?;
    let brute = full_spectrum_brute_force(&f, 8)?;
    println!("full spectrum of x^8: {scaled}");
    if scaled != brute {
        return Err("scaling disagrees with the sweep over all directions".into());
    }

    let table = derivative_fiber_table(&f, 8, f.one())?;
    let ones: Vec<String> = table
        .iter()
        .filter(|&(_, k)| k == 1)
        .map(|(c, _)| f.format(c))
        .collect();
    println!("values taken once by (x+1)^8 - x^8: {}", ones.join(", "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
