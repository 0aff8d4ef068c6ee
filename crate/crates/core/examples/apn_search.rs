// One spectrum per exponent class, keeping the APN ones.

use std::error::Error;

use apn_spectra::equiv::all_classes;
use apn_spectra::gf::Field;
use apn_spectra::spectra::derivative_fiber_table;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for n in [3, 5] {
        let f = Field::new(3, n, None)?;
        let classes = all_classes(3, n)?;
        println!("GF(3^{n}): {} classes", classes.len());
        for c in classes {
            let table = derivative_fiber_table(&f, c.representative, f.one())?;
            if table.max_count() == 2 {
                println!("  APN {:?}: {}", c.members, table.spectrum());
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
