// GF(27), its quadratic character, and the tower GF(729) with its unit circle.

use std::error::Error;
use std::sync::Arc;

use apn_spectra::gf::{Field, FieldDescription, TowerField};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let f = Field::new(3, 3, None)?;
    println!("field {} with {} elements", f.description(), f.order());

    let g = f.primitive_element();
    println!("primitive element {} of order {:?}", f.format(g), f.multiplicative_order(g));

    let a = f.from_coeffs(&[1, 2])?;
    let b = f.from_coeffs(&[0, 1, 1])?;
    println!("({}) * ({}) = {}", f.format(a), f.format(b), f.format(f.mul(a, b)));
    println!("({})^-1 = {}", f.format(a), f.format(f.inv(a)?));
    println!("eta(-1) = {}", f.quadratic_character(f.from_int(-1)));

    let again: FieldDescription = f.description().parse()?;
    if again.build()?.description() != f.description() {
        return Err("description does not round-trip".into());
    }

    let tower = TowerField::new(Arc::new(f));
    let circle = tower.unit_circle_elements();
    println!("tower of order {}, unit circle of size {}", tower.order(), circle.len());
    let in_base = circle.iter().filter(|&&x| tower.to_base(x).is_some()).count();
    println!("unit circle points in the base field: {in_base}");
    if circle.len() != 28 || in_base != 2 {
        return Err("unexpected unit circle".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
