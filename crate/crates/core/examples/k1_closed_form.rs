//! Three samples of G fix a one-link chain. The closed form and the
//! general linearize-and-expand route agree.

use effham::forward::g_function;
use effham::inverse::{expand_to_chain, k1_closed_form, linearize_samples, K1Variables};
use effham::model::GSample;

fn main() -> effham::Result<()> {
    let samples = vec![
        GSample::new(0.0, -1.5),
        GSample::new(1.0, -2.0),
        GSample::new(3.0, -6.0),
    ];
    let vars = K1Variables::from_samples(&samples)?;
    println!("x1 = {}, x2 = {}, y1 = {}", vars.x1, vars.x2, vars.y1);

    let chain = k1_closed_form(&samples)?;
    println!("closed form: a = {:?}, rho = {:?}", chain.a, chain.rho);

    let general = expand_to_chain(&linearize_samples(&samples, 1)?)?;
    println!("general:     a = {:?}, rho = {:?}", general.a, general.rho);

    for s in &samples {
        println!("G({}) = {} (given {})", s.energy, g_function(&chain, s.energy)?, s.g_value);
    }
    if chain.rho[0] < 0.0 {
        println!("rho_0 < 0: no Hermitian chain reproduces these samples");
    }
    Ok(())
}
