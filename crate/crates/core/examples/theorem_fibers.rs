// Predicted against brute-force fiber sizes for the (3^n+1)/(3^k+1) family.

use std::error::Error;

use apn_spectra::chain::{ChainContext, Target};
use apn_spectra::spectra::reduced_spectrum;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (n, k) in [(3, 2), (5, 2), (5, 4), (7, 2), (7, 4), (7, 6)] {
        let ctx = ChainContext::new(n, k)?;
        let report = ctx.verify(Target::Derivative)?;
        let spectrum = reduced_spectrum(ctx.field(), ctx.d())?;
        println!(
            "n={n} k={k} d={:<5} {} fibers, all match: {}, spectrum {spectrum}",
            ctx.d(),
            report.records.len(),
            report.all_match
        );
        if !report.all_match || spectrum != ctx.predicted_spectrum() {
            return Err(format!("prediction failed for n={n}, k={k}").into());
        }
    }

    let ctx = ChainContext::new(3, 2)?;
    for r in ctx.verify(Target::Derivative)?.records.iter().take(6) {
        println!("  c = {:<8} brute {} predicted {}", r.c, r.brute, r.predicted);
    }

    match ChainContext::new(3, 3) {
        Ok(_) => return Err("k = 3 should be rejected".into()),
        Err(e) => println!("(3, 3): {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
