//! The continued fraction behind G(E), the `U F L` factors of the
//! excluded block and the resolvent they give.

use effham::forward::{continued_fraction, resolvent_factored, ufl_factorize};
use effham::model::{refactorize, FactorStyle};
use effham::TridiagonalChain;

fn main() -> effham::Result<()> {
    let chain = TridiagonalChain::new(vec![0.5, 2.0, 3.0], vec![1.0, 1.0])?;
    let factored = refactorize(&chain, FactorStyle::Symmetric)?;
    let energy = 0.0;

    let state = continued_fraction(&factored, energy)?;
    println!("f_1.. = {:?}", state.f);
    println!("pivots = {:?}", state.pivots);

    let ufl = ufl_factorize(&factored, energy)?;
    println!("U = {:.4}", ufl.upper());
    println!("F = {:.4}", ufl.diagonal());
    println!("L = {:.4}", ufl.lower());
    println!("U F L = {:.4}", ufl.product());

    let r = resolvent_factored(&factored, energy)?;
    println!("(QHQ - E)^-1 = {r:.6}");

    // a_2 - E vanishes at E = 3
    match continued_fraction(&factored, 3.0) {
        Ok(s) => println!("E = 3: f = {:?}", s.f),
        Err(e) => println!("E = 3: {e}"),
    }
    Ok(())
}
