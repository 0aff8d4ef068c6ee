// The two halves of mu(x) = x + 1/x over F: kappa on F* and lambda on U_E.

use std::error::Error;

use apn_spectra::chain::{averaging_identity_holds, classify_c, mu_fiber, ChainContext, Target};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ctx = ChainContext::new(3, 2)?;
    let (f, t) = (ctx.field(), ctx.tower());

    for c in f.elements().take(6) {
        let fiber: Vec<String> = mu_fiber(t, c).into_iter().map(|x| t.format(x)).collect();
        println!("c = {:<8} {:?} {:?}", f.format(c), classify_c(f, c), fiber);
    }

    let f4 = |c| ctx.f4(c).expect("f4 is total");
    println!("averaging identity for f4: {}", averaging_identity_holds(t, f4)?);

    for target in [Target::Kappa, Target::Lambda, Target::F4] {
        let report = ctx.verify(target)?;
        println!("{target:?} closed form matches: {}", report.all_match);
        if !report.all_match {
            return Err(format!("{target:?} closed form failed").into());
        }
    }

    let structure = ctx.fiber_structure_checks()?;
    println!("{structure:#?}");
    if !structure.all() {
        return Err("fiber structure check failed".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
