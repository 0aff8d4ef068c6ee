// The chain from the derivative of x^d to f4, stage by stage.

use std::error::Error;

use apn_spectra::chain::ChainContext;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ctx = ChainContext::new(3, 2)?;
    let f = ctx.field();
    println!("d1 = {}, d2 = {}, e2 = {}, d = {}", ctx.d1(), ctx.d2(), ctx.e2(), ctx.d());

    for x in f.elements().take(5) {
        println!(
            "x = {:<8} D = {:<8} f1(pi(x)) = {:<8} f4 = {}",
            f.format(x),
            f.format(ctx.derivative(x)),
            f.format(ctx.f1(ctx.pi(x))?),
            f.format(ctx.f4(x)?)
        );
    }

    let stages = ctx.chain_spectra()?;
    for (stage, s) in &stages {
        println!("{:<5} {s}", stage.name());
    }
    if !ctx.chain_relations_hold()? || stages.iter().any(|(_, s)| *s != stages[0].1) {
        return Err("chain broken".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
